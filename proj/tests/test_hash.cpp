#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "zkadmit/hash.hpp"

using namespace zkadmit;

// Known-answer values computed with an independent SHA-256 implementation
// over the documented encodings (length-prefixed tag, then payload).

TEST_CASE("tagged hash known answers", "[hash]") {
    Bytes payload{'p', 'a', 'y', 'l', 'o', 'a', 'd'};
    REQUIRE(digest_hex(hash_tagged("test-tag", payload)) ==
            "31078103aa420261de426a818c773c50112dc3ed55bfc26a4628d5ecb8097334");
    REQUIRE(digest_hex(hash_tagged("", Bytes{})) ==
            "af5570f5a1810b7af78caf4bc70a660f0df51e42baf91d4de5b2328de0e83dfc");
}

TEST_CASE("tag length is part of the domain", "[hash]") {
    // ("t","ag") and ("ta","g") concatenate to the same bytes; the length
    // prefix must still separate them.
    Bytes ag{'a', 'g'}, g{'g'};
    REQUIRE(digest_hex(hash_tagged("t", ag)) ==
            "634271ca796f63ba0d40945f5238b509536cf05a0b38c9ad6fb8d0422fafaf0f");
    REQUIRE(digest_hex(hash_tagged("ta", g)) ==
            "9671480ddaa2ecbd8149750114ddac1e6b6b382ce4dbf08fd1ac0285a58b182d");
    REQUIRE(hash_tagged("t", ag) != hash_tagged("ta", g));
}

TEST_CASE("byte-stream expansion known answer", "[hash]") {
    Bytes seed{'s', 'e', 'e', 'd'};
    Bytes out = expand_bytes("exp", seed, 40);
    REQUIRE(to_hex(out) ==
            "23fde1a64d599a8414796f1e63a66f151a173dc5ae6c0ea486720b4104d0e3b387c6d36b0bf2416a");
    // prefix property: a shorter request is a prefix of a longer one
    Bytes out2 = expand_bytes("exp", seed, 16);
    REQUIRE(std::equal(out2.begin(), out2.end(), out.begin()));
}

TEST_CASE("random stream known answers and determinism", "[hash]") {
    RandomStream rng(Bytes{1, 2, 3}, "lbl");
    const uint64_t expected[6] = {0xecc1a76a7fc6f14cULL, 0x141ff468c4c51abbULL,
                                  0x70b0fb95f0607f42ULL, 0x19906e219ddc34b3ULL,
                                  0x33f1ec6216b8e8f3ULL, 0x361de34e46c9d94bULL};
    for (uint64_t e : expected) REQUIRE(rng.next_u64() == e);

    RandomStream again(Bytes{1, 2, 3}, "lbl");
    REQUIRE(again.next_u64() == expected[0]);
}

TEST_CASE("uniform sampling matches the rejection oracle", "[hash]") {
    RandomStream rng(Bytes{9}, "u");
    const uint64_t expected[4] = {4, 8, 3, 0};
    for (uint64_t e : expected) REQUIRE(rng.uniform(10) == e);
    REQUIRE_THROWS_AS(rng.uniform(0), InvalidParams);

    RandomStream r2(Bytes{7}, "bounds");
    for (int i = 0; i < 500; i++) REQUIRE(r2.uniform(13) < 13);
    for (int i = 0; i < 100; i++) REQUIRE(r2.uniform(1) == 0);
}

TEST_CASE("forked streams are independent of the parent and each other", "[hash]") {
    RandomStream parent(Bytes{5}, "parent");
    RandomStream a = parent.fork("a");
    RandomStream b = parent.fork("b");
    RandomStream a2 = parent.fork("a");
    uint64_t va = a.next_u64(), vb = b.next_u64();
    REQUIRE(va != vb);
    REQUIRE(va == a2.next_u64());
    // consuming the parent does not change what forks produce
    RandomStream parent2(Bytes{5}, "parent");
    parent2.next_u64();
    REQUIRE(parent2.fork("a").next_u64() == va);
}

TEST_CASE("seed and label both separate streams", "[hash]") {
    std::set<uint64_t> firsts;
    for (uint8_t s = 0; s < 8; s++)
        for (int l = 0; l < 8; l++)
            firsts.insert(RandomStream(Bytes{s}, "l" + std::to_string(l)).next_u64());
    REQUIRE(firsts.size() == 64);
}

TEST_CASE("bytes() draws are reproducible", "[hash]") {
    RandomStream a(Bytes{42}, "bytes");
    RandomStream b(Bytes{42}, "bytes");
    REQUIRE(a.bytes(100) == b.bytes(100));
}
