#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/miller_rabin.hpp>

#include "zkadmit/ring.hpp"

using namespace zkadmit;
using namespace zkadmit::algebra;

namespace {

// Independent negacyclic schoolbook product in Z_t[X]/(X^n + 1).
RingElement oracle_negacyclic(const RingParams& rp, const RingElement& a, const RingElement& b) {
    RingElement c(rp.n, 0);
    for (size_t i = 0; i < rp.n; i++)
        for (size_t j = 0; j < rp.n; j++) {
            uint64_t prod = uint64_t((unsigned __int128)a[i] * b[j] % rp.t);
            size_t k = i + j;
            if (k < rp.n) {
                c[k] = uint64_t(((unsigned __int128)c[k] + prod) % rp.t);
            } else {
                k -= rp.n; // X^n = -1
                c[k] = uint64_t(((unsigned __int128)c[k] + rp.t - prod) % rp.t);
            }
        }
    return c;
}

} // namespace

TEST_CASE("ring multiplication matches the schoolbook oracle", "[ring]") {
    AlgebraParams ap;
    RingParams rp = ap.ring();
    RandomStream rng(Bytes{1}, "ring-test");
    for (int iter = 0; iter < 50; iter++) {
        RingElement a = ring_sample(rp, rng);
        RingElement b = ring_sample(rp, rng);
        REQUIRE(ring_mul(rp, a, b) == oracle_negacyclic(rp, a, b));
    }
}

TEST_CASE("wraparound sign flip", "[ring]") {
    AlgebraParams ap;
    RingParams rp = ap.ring();
    // X^(n-1) * X = X^n = -1
    RingElement xn1 = ring_zero(rp);
    xn1[rp.n - 1] = 1;
    RingElement x = ring_zero(rp);
    x[1] = 1;
    RingElement got = ring_mul(rp, xn1, x);
    RingElement want = ring_zero(rp);
    want[0] = rp.t - 1;
    REQUIRE(got == want);
}

TEST_CASE("ring is a commutative algebra over the embedding", "[ring]") {
    AlgebraParams ap;
    RingParams rp = ap.ring();
    RandomStream rng(Bytes{2}, "ring-test");
    RingElement a = ring_sample(rp, rng), b = ring_sample(rp, rng), c = ring_sample(rp, rng);
    REQUIRE(ring_mul(rp, a, b) == ring_mul(rp, b, a));
    REQUIRE(ring_add(rp, a, b) == ring_add(rp, b, a));
    REQUIRE(ring_mul(rp, a, ring_add(rp, b, c)) ==
            ring_add(rp, ring_mul(rp, a, b), ring_mul(rp, a, c)));
    REQUIRE(ring_mul(rp, a, ring_one(rp)) == a);
    REQUIRE(ring_add(rp, a, ring_neg(rp, a)) == ring_zero(rp));
    uint64_t s = rng.uniform(rp.t);
    REQUIRE(ring_scalar_mul(rp, s, a) == ring_mul(rp, embed(rp, s), a));
    REQUIRE(ring_sub(rp, a, b) == ring_add(rp, a, ring_neg(rp, b)));
}

TEST_CASE("dimension checks", "[ring]") {
    AlgebraParams ap;
    RingParams rp = ap.ring();
    RingElement bad(rp.n + 1, 0);
    REQUIRE_THROWS_AS(ring_add(rp, bad, ring_zero(rp)), ParamMismatch);
    REQUIRE_THROWS_AS(ring_mul(rp, ring_zero(rp), bad), ParamMismatch);
}

TEST_CASE("serialization round trip", "[ring]") {
    AlgebraParams ap;
    RingParams rp = ap.ring();
    RandomStream rng(Bytes{3}, "ring-test");
    RingElement a = ring_sample(rp, rng);
    Bytes b;
    put_ring(b, a);
    ByteReader r(b);
    REQUIRE(read_ring(r, rp) == a);
    REQUIRE(r.done());
}

TEST_CASE("default algebra parameters are sound", "[ring]") {
    AlgebraParams ap;
    ap.validate();
    REQUIRE(ap.t == ap.p);
    REQUIRE((ap.n & (ap.n - 1)) == 0);

    // every ciphertext-modulus prime is actually prime, odd, below 2^63,
    // pairwise distinct, and distinct from the plaintext modulus
    using boost::multiprecision::cpp_int;
    std::set<uint64_t> seen;
    cpp_int q = 1;
    for (uint64_t qi : AlgebraParams::default_q_primes()) {
        REQUIRE(boost::multiprecision::miller_rabin_test(cpp_int(qi), 32));
        REQUIRE(qi % 2 == 1);
        REQUIRE(qi < (1ULL << 63));
        REQUIRE(qi != ap.t);
        seen.insert(qi);
    }
    REQUIRE(seen.size() == AlgebraParams::default_q_primes().size());
    for (uint64_t qi : AlgebraParams::default_q_primes()) q *= qi;
    // the decryption budget must dominate the worst tracked payload bound
    REQUIRE(boost::multiprecision::msb(q) + 1 >= 496);
}

TEST_CASE("parameter validation rejects malformed sets", "[ring]") {
    AlgebraParams ap;
    ap.n = 12; // not a power of two
    REQUIRE_THROWS_AS(ap.validate(), InvalidParams);
    ap = AlgebraParams{};
    ap.q_primes = {6}; // even
    REQUIRE_THROWS_AS(ap.validate(), InvalidParams);
    ap = AlgebraParams{};
    ap.q_primes.push_back(ap.t); // collides with plaintext modulus
    REQUIRE_THROWS_AS(ap.validate(), InvalidParams);
}
