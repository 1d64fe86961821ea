#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace zkadmit;
using namespace zkadmit::relation;

TEST_CASE("admission relation shape is frozen", "[relation]") {
    const auto& pp = zkt::params();
    REQUIRE(pp.shape.m_c == 1613);
    REQUIRE(pp.shape.num_witness == 1613);
    REQUIRE(pp.shape.num_public == size_t(kXLen));
    REQUIRE(pp.shape.A.entries.size() == 2456);
    REQUIRE(pp.shape.B.entries.size() == 3221);
    REQUIRE(pp.shape.C.entries.size() == 1457);
    // the shape and therefore the verification key are deterministic
    algebra::AlgebraParams ap;
    RelationConfig rcfg;
    auto pp2 = pipeline::make_protocol_params(ap, rcfg, Bytes{'t', 'e', 's', 't'});
    REQUIRE(pp2.shape.digest() == pp.shape.digest());
    REQUIRE(pp2.vk == pp.vk);
}

TEST_CASE("honest credentials satisfy the relation", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{1}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    zkt::HonestPair h = zkt::make_honest_pair(pp, issuer, rng);

    REQUIRE(check_c1(pp.f, pp.shape, h.inst, h.wit, pp.pp));
    REQUIRE(h.inst.u == 1);
    REQUIRE(h.inst.x.size() == size_t(kXLen));
    REQUIRE(h.inst.x[kXHashPhc] == phc_hash(pp.f, h.phc));
    REQUIRE(h.inst.x[kXIssuerPk] == issuer.pk);
    REQUIRE(h.cred.hash_phc == h.inst.x[kXHashPhc]);
    REQUIRE(h.cred.pk_seed == h.seed_kp.pk);
}

TEST_CASE("a holder cannot use someone else's credential", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{2}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    ToyKeyPair holder = toy_keygen(pp.f, rng);
    ToyKeyPair thief = toy_keygen(pp.f, rng);
    Phc phc = issue_phc(pp.f, issuer, holder.pk, {1, 2, 3}, rng);
    // assignment generation with the wrong secret produces an unsatisfiable
    // trace, which instance generation refuses to commit
    auto [x, W] = generate_assignment(pp.f, pp.rcfg, phc, thief.sk, rng);
    REQUIRE_FALSE(check_r1cs(pp.f, pp.shape, x, W));
    REQUIRE_THROWS_AS(client_generate(pp.f, pp.shape, x, W, pp.pp, rng), NotSatisfied);
}

TEST_CASE("tampered credential bodies are refused", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{3}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    ToyKeyPair holder = toy_keygen(pp.f, rng);
    Phc phc = issue_phc(pp.f, issuer, holder.pk, {4, 5, 6}, rng);
    Phc forged = phc;
    forged.attributes[1] = 999; // issuer signature no longer covers the body
    auto [x, W] = generate_assignment(pp.f, pp.rcfg, forged, holder.sk, rng);
    REQUIRE_FALSE(check_r1cs(pp.f, pp.shape, x, W));
    REQUIRE_THROWS_AS(client_generate(pp.f, pp.shape, x, W, pp.pp, rng), NotSatisfied);
    Phc padded = phc;
    padded.attributes.push_back(7); // wrong arity cannot even be assigned
    REQUIRE_THROWS_AS(generate_assignment(pp.f, pp.rcfg, padded, holder.sk, rng), ParamMismatch);
}

TEST_CASE("committed-relaxed check localizes failures", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{4}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    zkt::HonestPair h = zkt::make_honest_pair(pp, issuer, rng);
    C1Failure why;

    auto wit = h.wit;
    wit.W[10] = pp.f.add(wit.W[10], 1);
    REQUIRE_FALSE(check_c1(pp.f, pp.shape, h.inst, wit, pp.pp, &why));
    REQUIRE(why == C1Failure::WOpening);

    wit = h.wit;
    wit.r_E[0] = pp.f.add(wit.r_E[0], 1);
    REQUIRE_FALSE(check_c1(pp.f, pp.shape, h.inst, wit, pp.pp, &why));
    REQUIRE(why == C1Failure::EOpening);

    // commitments opened correctly but the witness breaks a constraint
    auto [inst, cw] = zkt::make_corrupt_pair(pp, h, 100, rng);
    REQUIRE_FALSE(check_c1(pp.f, pp.shape, inst, cw, pp.pp, &why));
    REQUIRE(why == C1Failure::Relaxed);

    REQUIRE(check_c1(pp.f, pp.shape, h.inst, h.wit, pp.pp, &why));
    REQUIRE(why == C1Failure::None);
}

TEST_CASE("instance and witness serialization round trips", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{5}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    zkt::HonestPair h = zkt::make_honest_pair(pp, issuer, rng);
    // stable encodings drive transcript digests; same content, same bytes
    REQUIRE(h.inst.serialize() == h.inst.serialize());
    zkt::HonestPair h2 = zkt::make_honest_pair(pp, issuer, rng);
    REQUIRE(h.inst.serialize() != h2.inst.serialize());
    REQUIRE(h.wit.serialize() != h2.wit.serialize());
}

TEST_CASE("credential binding covers instance and seed key", "[relation]") {
    const auto& pp = zkt::params();
    RandomStream rng(Bytes{6}, "relation-test");
    ToyKeyPair issuer = toy_keygen(pp.f, rng);
    zkt::HonestPair h = zkt::make_honest_pair(pp, issuer, rng);
    // a credential whose instance does not carry the claimed hash is refused
    Phc other = issue_phc(pp.f, issuer, h.holder.pk, {9, 9, 9}, rng);
    REQUIRE_THROWS_AS(make_res_credential(pp.f, other, h.inst, h.wit, h.seed_kp),
                      InconsistentCredential);
}
