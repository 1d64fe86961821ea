#include <catch2/catch_amalgamated.hpp>

#include "zkadmit/rns.hpp"

using namespace zkadmit;
using namespace zkadmit::mkhe;
using boost::multiprecision::cpp_int;

namespace {

RnsContext make_ctx() {
    algebra::AlgebraParams ap;
    return RnsContext(ap.q_primes, ap.n, ap.t);
}

// Independent residue decomposition of a wide integer.
RnsPoly poly_from_cpp(const RnsContext& rc, const std::vector<cpp_int>& coeffs) {
    RnsPoly p(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) {
            cpp_int v = coeffs[c] % rc.primes[i];
            if (v < 0) v += rc.primes[i];
            p[i * rc.n + c] = v.convert_to<uint64_t>();
        }
    return p;
}

cpp_int centered(const RnsContext& rc, const cpp_int& v) {
    cpp_int r = v % rc.q;
    if (r < 0) r += rc.q;
    if (r > rc.q_half) r -= rc.q;
    return r;
}

// centered CRT lift of one coefficient: crt_coeff maps into [0, q)
cpp_int lift(const RnsContext& rc, const RnsPoly& p, size_t c) {
    return centered(rc, crt_coeff(rc, p, c));
}

} // namespace

TEST_CASE("CRT reconstruction inverts residue decomposition", "[rns]") {
    RnsContext rc = make_ctx();
    RandomStream rng(Bytes{1}, "rns-test");
    for (int iter = 0; iter < 10; iter++) {
        // random wide coefficients across the full range of q
        std::vector<cpp_int> coeffs(rc.n);
        for (auto& c : coeffs) {
            cpp_int v = 0;
            for (int w = 0; w < 8; w++) v = (v << 64) | rng.next_u64();
            c = v % rc.q;
        }
        RnsPoly p = poly_from_cpp(rc, coeffs);
        for (size_t c = 0; c < rc.n; c++) {
            REQUIRE(crt_coeff(rc, p, c) >= 0);
            REQUIRE(crt_coeff(rc, p, c) < rc.q);
            REQUIRE(lift(rc, p, c) == centered(rc, coeffs[c]));
        }
    }
}

TEST_CASE("signed lift round trip", "[rns]") {
    RnsContext rc = make_ctx();
    std::vector<int64_t> coeffs(rc.n);
    for (size_t i = 0; i < rc.n; i++) coeffs[i] = int64_t(i * 997) - 3000;
    RnsPoly p = rns_from_signed(rc, coeffs);
    for (size_t c = 0; c < rc.n; c++) REQUIRE(lift(rc, p, c) == coeffs[c]);
}

TEST_CASE("rns arithmetic tracks wide-integer arithmetic", "[rns]") {
    RnsContext rc = make_ctx();
    RandomStream rng(Bytes{2}, "rns-test");
    RnsPoly a = rns_sample_uniform(rc, rng);
    RnsPoly b = rns_sample_uniform(rc, rng);

    RnsPoly sum = rns_add(rc, a, b);
    RnsPoly neg = rns_neg(rc, a);
    for (size_t c = 0; c < rc.n; c++) {
        cpp_int va = lift(rc, a, c), vb = lift(rc, b, c);
        REQUIRE(centered(rc, va + vb) == lift(rc, sum, c));
        REQUIRE(centered(rc, -va) == lift(rc, neg, c));
    }
}

TEST_CASE("rns negacyclic product matches a wide-integer oracle", "[rns]") {
    algebra::AlgebraParams ap;
    RnsContext rc(std::vector<uint64_t>{ap.q_primes[0], ap.q_primes[1]}, 8, ap.t);
    RandomStream rng(Bytes{3}, "rns-test");
    RnsPoly a = rns_sample_uniform(rc, rng);
    RnsPoly b = rns_sample_uniform(rc, rng);
    RnsPoly prod = rns_mul(rc, a, b);

    std::vector<cpp_int> va(rc.n), vb(rc.n), vc(rc.n, 0);
    for (size_t c = 0; c < rc.n; c++) {
        va[c] = lift(rc, a, c);
        vb[c] = lift(rc, b, c);
    }
    for (size_t i = 0; i < rc.n; i++)
        for (size_t j = 0; j < rc.n; j++) {
            cpp_int t = va[i] * vb[j];
            size_t k = i + j;
            if (k < rc.n) vc[k] += t;
            else vc[k - rc.n] -= t;
        }
    for (size_t c = 0; c < rc.n; c++) REQUIRE(centered(rc, vc[c]) == lift(rc, prod, c));
}

TEST_CASE("fma accumulates a scalar multiple", "[rns]") {
    RnsContext rc = make_ctx();
    RandomStream rng(Bytes{4}, "rns-test");
    RnsPoly a = rns_sample_uniform(rc, rng);
    RnsPoly b = rns_sample_uniform(rc, rng);
    std::vector<uint64_t> s(rc.np());
    uint64_t sval = rng.uniform(rc.primes[0] / 2);
    for (size_t i = 0; i < rc.np(); i++) s[i] = sval % rc.primes[i];

    RnsPoly expect_direct = rns_add(rc, a, rns_scalar_mul(rc, s, b));
    RnsPoly acc = a;
    rns_fma_in(rc, acc, s, b);
    REQUIRE(acc == expect_direct);
    for (size_t c = 0; c < rc.n; c++)
        REQUIRE(lift(rc, acc, c) ==
                centered(rc, lift(rc, a, c) + cpp_int(sval) * lift(rc, b, c)));
}

TEST_CASE("ring embedding and extraction agree", "[rns]") {
    RnsContext rc = make_ctx();
    algebra::AlgebraParams ap;
    algebra::RingParams rp = ap.ring();
    RandomStream rng(Bytes{5}, "rns-test");
    algebra::RingElement m = algebra::ring_sample(rp, rng);
    RnsPoly p = rns_from_ring(rc, m);
    REQUIRE(rns_to_ring(rc, p) == m);
}

TEST_CASE("smudging noise is bounded and wide", "[rns]") {
    RnsContext rc = make_ctx();
    RandomStream rng(Bytes{6}, "rns-test");
    cpp_int bound = cpp_int(1) << (kSmudgeBits + 1);
    bool sawWide = false;
    for (int iter = 0; iter < 5; iter++) {
        RnsPoly s = rns_sample_smudge(rc, rng);
        for (size_t c = 0; c < rc.n; c++) {
            cpp_int v = lift(rc, s, c);
            REQUIRE(abs(v) <= bound);
            if (abs(v) > (cpp_int(1) << 200)) sawWide = true;
        }
    }
    REQUIRE(sawWide); // the flood must actually use its magnitude
}

TEST_CASE("fresh error terms are small and centered", "[rns]") {
    RnsContext rc = make_ctx();
    RandomStream rng(Bytes{7}, "rns-test");
    for (int iter = 0; iter < 20; iter++) {
        RnsPoly e = rns_scaled_err(rc, rng);
        for (size_t c = 0; c < rc.n; c++) {
            cpp_int v = lift(rc, e, c);
            // scaled by the plaintext modulus: e = t * e0 with |e0| <= kErrBound
            REQUIRE(v % rc.t == 0);
            REQUIRE(abs(v / rc.t) <= kErrBound);
        }
    }
}
