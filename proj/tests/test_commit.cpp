#include <catch2/catch_amalgamated.hpp>

#include "zkadmit/commit.hpp"

using namespace zkadmit;
using namespace zkadmit::commit;
using algebra::AlgebraParams;
using algebra::RingElement;
using algebra::RingParams;

namespace {

struct Fixture {
    AlgebraParams ap;
    RingParams rp;
    algebra::Field f;
    CommitParams pp;
    Fixture() : rp(ap.ring()), f(ap.field()), pp(gen_params(rp, Bytes{'c'}, "E", 4, 4, 9)) {}

    std::vector<RingElement> rvec(size_t n, RandomStream& rng) const {
        std::vector<RingElement> v;
        for (size_t i = 0; i < n; i++) v.push_back(algebra::ring_sample(rp, rng));
        return v;
    }
};

} // namespace

TEST_CASE("commitments are additively homomorphic", "[commit]") {
    Fixture fx;
    RandomStream rng(Bytes{1}, "commit-test");
    auto M1 = fx.rvec(fx.pp.m, rng), M2 = fx.rvec(fx.pp.m, rng);
    auto r1 = fx.rvec(fx.pp.l, rng), r2 = fx.rvec(fx.pp.l, rng);

    Commitment lhs = zkadmit::commit::commit(fx.pp, M1, r1);
    Commitment rhs = zkadmit::commit::commit(fx.pp, M2, r2);
    std::vector<RingElement> Msum, rsum;
    for (size_t i = 0; i < M1.size(); i++) Msum.push_back(algebra::ring_add(fx.rp, M1[i], M2[i]));
    for (size_t i = 0; i < r1.size(); i++) rsum.push_back(algebra::ring_add(fx.rp, r1[i], r2[i]));
    Commitment direct = zkadmit::commit::commit(fx.pp, Msum, rsum);

    REQUIRE(lhs.value.size() == fx.pp.k);
    for (size_t row = 0; row < fx.pp.k; row++)
        REQUIRE(algebra::ring_add(fx.rp, lhs.value[row], rhs.value[row]) == direct.value[row]);
}

TEST_CASE("three-term fold opens to the folded message", "[commit]") {
    // c1 + v*c2 + v^2*c3 must equal a direct commitment to
    // M1 + v*M2 + v^2*M3 under randomness r1 + v*r2 + v^2*r3.
    Fixture fx;
    RandomStream rng(Bytes{2}, "commit-test");
    auto field_vec = [&](size_t n) {
        std::vector<uint64_t> v(n);
        for (auto& x : v) x = fx.f.sample(rng);
        return v;
    };
    auto M1 = field_vec(fx.pp.m), M2 = field_vec(fx.pp.m), M3 = field_vec(fx.pp.m);
    auto r1 = field_vec(fx.pp.l), r2 = field_vec(fx.pp.l), r3 = field_vec(fx.pp.l);
    uint64_t v = fx.f.sample(rng);

    Commitment c1 = commit_fields(fx.pp, M1, r1);
    Commitment c2 = commit_fields(fx.pp, M2, r2);
    Commitment c3 = commit_fields(fx.pp, M3, r3);
    Commitment folded = fold_commitments(
        fx.rp, fx.f, fold_commitments(fx.rp, fx.f, c1, c2, v, 1), c3, v, 2);

    std::vector<uint64_t> Mf = algebra::vec_fma(fx.f, algebra::vec_fma(fx.f, M1, v, M2),
                                                fx.f.mul(v, v), M3);
    std::vector<uint64_t> rf = algebra::vec_fma(fx.f, algebra::vec_fma(fx.f, r1, v, r2),
                                                fx.f.mul(v, v), r3);
    REQUIRE(folded == commit_fields(fx.pp, Mf, rf));
}

TEST_CASE("distinct labels use distinct matrices", "[commit]") {
    Fixture fx;
    CommitParams ppW = gen_params(fx.rp, Bytes{'c'}, "W", 4, 4, 9);
    REQUIRE(ppW.params_digest != fx.pp.params_digest);
    RandomStream rng(Bytes{3}, "commit-test");
    std::vector<uint64_t> M(fx.pp.m), r(fx.pp.l, 0);
    for (auto& x : M) x = fx.f.sample(rng);
    Commitment cE = commit_fields(fx.pp, M, r);
    Commitment cW = commit_fields(ppW, M, r);
    REQUIRE(cE.value != cW.value);
    REQUIRE_THROWS_AS(fold_commitments(fx.rp, fx.f, cE, cW, 5, 1), ParamMismatch);
}

TEST_CASE("commitment distinguishes messages and randomness", "[commit]") {
    Fixture fx;
    RandomStream rng(Bytes{4}, "commit-test");
    std::vector<uint64_t> M(fx.pp.m), r(fx.pp.l);
    for (auto& x : M) x = fx.f.sample(rng);
    for (auto& x : r) x = fx.f.sample(rng);
    Commitment base = commit_fields(fx.pp, M, r);

    auto M2 = M;
    M2[3] = fx.f.add(M2[3], 1);
    REQUIRE(commit_fields(fx.pp, M2, r) != base);
    auto r2 = r;
    r2[0] = fx.f.add(r2[0], 1);
    REQUIRE(commit_fields(fx.pp, M, r2) != base); // hiding randomness is binding too
}

TEST_CASE("zero commitment and empty operand checks", "[commit]") {
    Fixture fx;
    std::vector<uint64_t> M(fx.pp.m, 0), r(fx.pp.l, 0);
    REQUIRE(zero_commitment(fx.pp) == commit_fields(fx.pp, M, r));
    REQUIRE_THROWS_AS(commit_fields(fx.pp, std::vector<uint64_t>(3), r), ParamMismatch);
    REQUIRE_THROWS_AS(gen_params(fx.rp, Bytes{}, "E", 4, 4, 9), InvalidParams);
    REQUIRE_THROWS_AS(gen_params(fx.rp, Bytes{'c'}, "E", 0, 4, 9), InvalidParams);
}

TEST_CASE("commitment serialization round trip", "[commit]") {
    Fixture fx;
    RandomStream rng(Bytes{5}, "commit-test");
    std::vector<uint64_t> M(fx.pp.m), r(fx.pp.l);
    for (auto& x : M) x = fx.f.sample(rng);
    for (auto& x : r) x = fx.f.sample(rng);
    Commitment c = commit_fields(fx.pp, M, r);
    Bytes b = commitment_bytes(c);
    ByteReader br(b);
    REQUIRE(read_commitment(br, fx.rp) == c);
    REQUIRE(br.done());
}

TEST_CASE("fold power validation", "[commit]") {
    Fixture fx;
    Commitment z = zero_commitment(fx.pp);
    REQUIRE_THROWS_AS(fold_commitments(fx.rp, fx.f, z, z, 1, 3), InvalidParams);
    REQUIRE_NOTHROW(fold_commitments(fx.rp, fx.f, z, z, 1, 2));
}
