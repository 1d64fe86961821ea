#include <catch2/catch_amalgamated.hpp>

#include "zkadmit/mlsags.hpp"

using namespace zkadmit;
using namespace zkadmit::mlsags;

namespace {

// a ring with the signer's key planted at the given index
std::vector<uint64_t> make_ring(RandomStream& rng, size_t n, size_t signer_index,
                                const SeedKeyPair& kp) {
    std::vector<uint64_t> ring(n);
    for (size_t i = 0; i < n; i++) ring[i] = i == signer_index ? kp.pk : lrs_keygen(rng).pk;
    return ring;
}

} // namespace

TEST_CASE("group arithmetic matches its defining identities", "[mlsags]") {
    // the generator really has order rho
    REQUIRE(group_pow(kGroupGen, kGroupOrder) == 1);
    REQUIRE(group_pow(kGroupGen, 1) == kGroupGen);
    REQUIRE(group_pow(kGroupGen, 0) == 1);
    REQUIRE(kGroupP == 2 * kGroupOrder + 1);

    RandomStream rng(Bytes{30}, "mlsags-test");
    for (int i = 0; i < 20; i++) {
        uint64_t a = 1 + rng.uniform(kGroupOrder - 1);
        uint64_t b = 1 + rng.uniform(kGroupOrder - 1);
        // g^a * g^b = g^(a+b mod rho)
        uint64_t lhs = group_mul(group_pow(kGroupGen, a), group_pow(kGroupGen, b));
        unsigned __int128 e = (unsigned __int128)a + b;
        REQUIRE(lhs == group_pow(kGroupGen, uint64_t(e % kGroupOrder)));
        REQUIRE(scalar_sub(a, b) == (a >= b ? a - b : a + kGroupOrder - b));
    }

    // hash_to_group lands in the order-rho subgroup, never at the identity
    for (uint8_t i = 0; i < 10; i++) {
        uint64_t x = hash_to_group(Bytes{i});
        REQUIRE(x != 1);
        REQUIRE(group_pow(x, kGroupOrder) == 1);
    }

    Digest d = hash_tagged("t", Bytes{1});
    REQUIRE(digest_mod(d, 97) < 97);
    REQUIRE(digest_mod(d, kGroupOrder) < kGroupOrder);
}

TEST_CASE("ring signatures verify across sizes and signer positions", "[mlsags]") {
    RandomStream rng(Bytes{31}, "mlsags-test");
    for (int trial = 0; trial < 100; trial++) {
        size_t n = 1 + size_t(rng.uniform(12));
        size_t signer = size_t(rng.uniform(n));
        SeedKeyPair kp = lrs_keygen(rng);
        std::vector<uint64_t> ring = make_ring(rng, n, signer, kp);
        Bytes msg = rng.bytes(16);
        RingSignature sig = lrs_sign(msg, ring, signer, kp.sk, rng);
        REQUIRE(lrs_verify(msg, ring, sig));
        REQUIRE(sig.y0 == key_image(kp));

        Bytes other = msg;
        other[0] ^= 1;
        REQUIRE_FALSE(lrs_verify(other, ring, sig));
    }
}

TEST_CASE("two signatures by one key share a key image", "[mlsags]") {
    RandomStream rng(Bytes{32}, "mlsags-test");
    SeedKeyPair kp = lrs_keygen(rng);
    SeedKeyPair stranger = lrs_keygen(rng);

    std::vector<uint64_t> ring1 = make_ring(rng, 5, 2, kp);
    std::vector<uint64_t> ring2 = make_ring(rng, 8, 0, kp);
    RingSignature s1 = lrs_sign(Bytes{'a'}, ring1, 2, kp.sk, rng);
    RingSignature s2 = lrs_sign(Bytes{'b'}, ring2, 0, kp.sk, rng);
    REQUIRE(lrs_verify(Bytes{'a'}, ring1, s1));
    REQUIRE(lrs_verify(Bytes{'b'}, ring2, s2));
    REQUIRE(lrs_link(s1, s2)); // different rings, messages: same signer

    std::vector<uint64_t> ring3 = make_ring(rng, 5, 4, stranger);
    RingSignature s3 = lrs_sign(Bytes{'c'}, ring3, 4, stranger.sk, rng);
    REQUIRE_FALSE(lrs_link(s1, s3));
}

TEST_CASE("mutated signatures are rejected", "[mlsags]") {
    RandomStream rng(Bytes{33}, "mlsags-test");
    SeedKeyPair kp = lrs_keygen(rng);
    std::vector<uint64_t> ring = make_ring(rng, 6, 3, kp);
    Bytes msg{'m', 's', 'g'};
    RingSignature sig = lrs_sign(msg, ring, 3, kp.sk, rng);
    REQUIRE(lrs_verify(msg, ring, sig));

    auto bad = sig;
    bad.c0 = scalar_mod(bad.c0 + 1);
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    bad = sig;
    bad.s[1] = scalar_mod(bad.s[1] + 1);
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    bad = sig;
    bad.y0 = group_mul(bad.y0, kGroupGen);
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    bad = sig;
    bad.ring_digest[0] ^= 1;
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    bad = sig;
    bad.s.pop_back();
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    // degenerate key images are refused outright
    bad = sig;
    bad.y0 = 1;
    REQUIRE_FALSE(lrs_verify(msg, ring, bad));

    // a reordered ring no longer matches the signed ring digest
    auto shuffled = ring;
    std::swap(shuffled[0], shuffled[5]);
    REQUIRE_FALSE(lrs_verify(msg, shuffled, sig));

    // a different ring of the same size fails too
    auto replaced = ring;
    replaced[0] = lrs_keygen(rng).pk;
    REQUIRE_FALSE(lrs_verify(msg, replaced, sig));

    REQUIRE_FALSE(lrs_verify(msg, {}, sig));
}

TEST_CASE("signing demands a well-formed ring and a matching key", "[mlsags]") {
    RandomStream rng(Bytes{34}, "mlsags-test");
    SeedKeyPair kp = lrs_keygen(rng);
    std::vector<uint64_t> ring = make_ring(rng, 4, 1, kp);
    Bytes msg{'x'};

    REQUIRE_THROWS_AS(lrs_sign(msg, ring, 4, kp.sk, rng), SignerNotInRing);
    REQUIRE_THROWS_AS(lrs_sign(msg, {}, 0, kp.sk, rng), SignerNotInRing);
    // the key must open the claimed slot
    REQUIRE_THROWS_AS(lrs_sign(msg, ring, 0, kp.sk, rng), SignerNotInRing);
    REQUIRE_THROWS_AS(lrs_sign(msg, ring, 1, kp.sk + 1, rng), SignerNotInRing);

    auto dup = ring;
    dup[2] = dup[1] = kp.pk;
    REQUIRE_THROWS_AS(lrs_sign(msg, dup, 1, kp.sk, rng), DuplicateRingKey);
}

TEST_CASE("signature records serialize deterministically", "[mlsags]") {
    RandomStream rng(Bytes{35}, "mlsags-test");
    SeedKeyPair kp = lrs_keygen(rng);
    std::vector<uint64_t> ring = make_ring(rng, 3, 0, kp);
    RingSignature sig = lrs_sign(Bytes{'z'}, ring, 0, kp.sk, rng);
    REQUIRE(sig.serialize() == sig.serialize());
    RingSignature other = sig;
    other.c0 ^= 1;
    REQUIRE(sig.serialize() != other.serialize());
}
