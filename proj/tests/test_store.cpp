#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <thread>
#include <unistd.h>

#include "zkadmit/store.hpp"

using namespace zkadmit;
using namespace zkadmit::store;

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const char* tag) {
        path = fs::temp_directory_path() /
               (std::string("zkadmit-store-") + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("objects are stored and retrieved by content address", "[store]") {
    Store st;
    Bytes blob{1, 2, 3, 4, 5};
    ContentAddress addr = st.put(blob);
    REQUIRE(addr.digest == hash_tagged("store-object", blob));
    REQUIRE(st.has(addr));
    REQUIRE(st.get(addr) == blob);
    REQUIRE(st.object_count() == 1);

    // idempotent: same bytes, same address, no growth
    REQUIRE(st.put(blob) == addr);
    REQUIRE(st.object_count() == 1);

    ContentAddress other = address_of(Bytes{9, 9, 9});
    REQUIRE_FALSE(st.has(other));
    REQUIRE_THROWS_AS(st.get(other), IntegrityError);

    // empty blobs are fine and distinct
    ContentAddress empty = st.put(Bytes{});
    REQUIRE(empty != addr);
    REQUIRE(st.get(empty).empty());
}

TEST_CASE("name updates need a valid owner signature", "[store]") {
    RandomStream rng(Bytes{20}, "store-test");
    auto kp = mlsags::lrs_keygen(rng);
    Store st;
    ContentAddress t1 = st.put(Bytes{1});
    ContentAddress t2 = st.put(Bytes{2});

    NamePointer p1 = make_name_pointer(kp, t1, 1, rng);
    REQUIRE(verify_name_update(p1.owner_pk, p1.target, p1.sequence, p1.sig));
    st.publish(p1);
    REQUIRE(st.resolve(kp.pk).has_value());
    REQUIRE(st.resolve(kp.pk)->target == t1);

    // signatures bind owner, target, and sequence
    REQUIRE_FALSE(verify_name_update(p1.owner_pk, t2, p1.sequence, p1.sig));
    REQUIRE_FALSE(verify_name_update(p1.owner_pk, p1.target, 2, p1.sig));
    auto other = mlsags::lrs_keygen(rng);
    REQUIRE_FALSE(verify_name_update(other.pk, p1.target, p1.sequence, p1.sig));

    // a forged pointer is refused outright
    NamePointer forged = p1;
    forged.target = t2;
    forged.sequence = 2;
    REQUIRE_THROWS_AS(st.publish(forged), Unauthorized);

    // sequence numbers must strictly advance
    REQUIRE_THROWS_AS(st.publish(p1), StaleUpdate);
    NamePointer stale = make_name_pointer(kp, t2, 1, rng);
    REQUIRE_THROWS_AS(st.publish(stale), StaleUpdate);

    NamePointer p2 = make_name_pointer(kp, t2, 2, rng);
    st.publish(p2);
    REQUIRE(st.resolve(kp.pk)->target == t2);
    REQUIRE(st.name_log(kp.pk).size() == 2);
    REQUIRE(st.name_log(other.pk).empty());
    REQUIRE_FALSE(st.resolve(other.pk).has_value());
}

TEST_CASE("name pointer records round trip through serialization", "[store]") {
    RandomStream rng(Bytes{21}, "store-test");
    auto kp = mlsags::lrs_keygen(rng);
    NamePointer p = make_name_pointer(kp, address_of(Bytes{7}), 42, rng);
    REQUIRE(NamePointer::deserialize(p.serialize()) == p);

    Bytes b = p.serialize();
    b.push_back(0); // trailing bytes are an error
    REQUIRE_THROWS_AS(NamePointer::deserialize(b), IntegrityError);
}

TEST_CASE("a directory-backed store survives reopening", "[store]") {
    TempDir tmp("persist");
    RandomStream rng(Bytes{22}, "store-test");
    auto kp = mlsags::lrs_keygen(rng);
    Bytes blob{3, 1, 4, 1, 5};
    ContentAddress addr;
    NamePointer p;
    {
        Store st(tmp.path);
        addr = st.put(blob);
        p = make_name_pointer(kp, addr, 1, rng);
        st.publish(p);
    }
    {
        Store st(tmp.path);
        REQUIRE(st.object_count() == 1);
        REQUIRE(st.get(addr) == blob);
        REQUIRE(st.resolve(kp.pk).has_value());
        REQUIRE(*st.resolve(kp.pk) == p);
    }
}

TEST_CASE("a tampered object file fails the load-time address check", "[store]") {
    TempDir tmp("tamper");
    ContentAddress addr;
    {
        Store st(tmp.path);
        addr = st.put(Bytes{8, 8, 8});
    }
    {
        std::ofstream out(tmp.path / "objects" / addr.hex(), std::ios::binary);
        out << "not the original bytes";
    }
    REQUIRE_THROWS_AS(Store(tmp.path), IntegrityError);
}

TEST_CASE("concurrent writers do not corrupt the store", "[store]") {
    Store st;
    constexpr int kThreads = 8;
    constexpr int kPerThread = 50;
    std::vector<std::thread> ts;
    for (int t = 0; t < kThreads; t++) {
        ts.emplace_back([&st, t] {
            for (int i = 0; i < kPerThread; i++) {
                Bytes blob{uint8_t(t), uint8_t(i)};
                ContentAddress a = st.put(blob);
                if (st.get(a) != blob) std::abort();
            }
        });
    }
    for (auto& t : ts) t.join();
    REQUIRE(st.object_count() == kThreads * kPerThread);
}
