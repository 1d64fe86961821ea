#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>

#include "mlsags.hpp"

namespace zkadmit::store {

/* Content address: the digest of the stored bytes. */
struct ContentAddress {
    Digest digest{};
    bool operator==(const ContentAddress&) const = default;
    auto operator<=>(const ContentAddress&) const = default;
    std::string hex() const { return digest_hex(digest); }
};

inline ContentAddress address_of(const Bytes& blob) {
    return ContentAddress{hash_tagged("store-object", blob)};
}

/* Plain Schnorr signature binding a name update to its owner key. */
struct OwnerSignature {
    uint64_t R = 0;
    uint64_t s = 0;
    bool operator==(const OwnerSignature&) const = default;
};

inline Digest name_update_digest(uint64_t owner_pk, const ContentAddress& target,
                                 uint64_t sequence) {
    Bytes b;
    put_u64(b, owner_pk);
    put_digest(b, target.digest);
    put_u64(b, sequence);
    return hash_tagged("store-name-update", b);
}

inline OwnerSignature sign_name_update(const mlsags::SeedKeyPair& kp, const ContentAddress& target,
                                       uint64_t sequence, RandomStream& rng) {
    uint64_t k = 1 + rng.uniform(mlsags::kGroupOrder - 1);
    OwnerSignature sig;
    sig.R = mlsags::group_pow(mlsags::kGroupGen, k);
    Bytes eb;
    put_u64(eb, sig.R);
    put_digest(eb, name_update_digest(kp.pk, target, sequence));
    uint64_t e = mlsags::digest_mod(hash_tagged("store-name-sig", eb), mlsags::kGroupOrder);
    sig.s = (k + mlsags::scalar_mul(e, kp.sk)) % mlsags::kGroupOrder;
    return sig;
}

inline bool verify_name_update(uint64_t owner_pk, const ContentAddress& target, uint64_t sequence,
                               const OwnerSignature& sig) {
    Bytes eb;
    put_u64(eb, sig.R);
    put_digest(eb, name_update_digest(owner_pk, target, sequence));
    uint64_t e = mlsags::digest_mod(hash_tagged("store-name-sig", eb), mlsags::kGroupOrder);
    uint64_t lhs = mlsags::group_pow(mlsags::kGroupGen, sig.s);
    uint64_t rhs = mlsags::group_mul(sig.R, mlsags::group_pow(owner_pk, e));
    return lhs == rhs;
}

/* A mutable name owned by a key: points at an object, versioned by a
 * strictly increasing sequence number. */
struct NamePointer {
    uint64_t owner_pk = 0;
    ContentAddress target;
    uint64_t sequence = 0;
    OwnerSignature sig;

    bool operator==(const NamePointer&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, owner_pk);
        put_digest(b, target.digest);
        put_u64(b, sequence);
        put_u64(b, sig.R);
        put_u64(b, sig.s);
        return b;
    }

    static NamePointer deserialize(const Bytes& b) {
        ByteReader r(b);
        if (r.u32() != kEncodingVersion) throw IntegrityError("unsupported name record version");
        NamePointer p;
        p.owner_pk = r.u64();
        p.target.digest = read_digest(r);
        p.sequence = r.u64();
        p.sig.R = r.u64();
        p.sig.s = r.u64();
        r.done();
        return p;
    }
};

inline NamePointer make_name_pointer(const mlsags::SeedKeyPair& kp, const ContentAddress& target,
                                     uint64_t sequence, RandomStream& rng) {
    NamePointer p;
    p.owner_pk = kp.pk;
    p.target = target;
    p.sequence = sequence;
    p.sig = sign_name_update(kp, target, sequence, rng);
    return p;
}

/* Content-addressed object store with an append-only name log per owner.
 * Optionally mirrored to a directory: objects/<hex-digest> holds raw bytes,
 * names/<owner>.log one hex-encoded pointer record per line. */
class Store {
  public:
    Store() = default;

    explicit Store(const std::filesystem::path& dir) : dir_(dir) {
        namespace fs = std::filesystem;
        fs::create_directories(*dir_ / "objects");
        fs::create_directories(*dir_ / "names");
        for (const auto& ent : fs::directory_iterator(*dir_ / "objects")) {
            std::ifstream in(ent.path(), std::ios::binary);
            Bytes blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            ContentAddress addr = address_of(blob);
            if (addr.hex() != ent.path().filename().string())
                throw IntegrityError("stored object does not match its address");
            objects_[addr] = std::move(blob);
        }
        for (const auto& ent : fs::directory_iterator(*dir_ / "names")) {
            std::ifstream in(ent.path());
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty()) continue;
                NamePointer p = NamePointer::deserialize(from_hex(line));
                replay_publish(p);
            }
        }
    }

    ContentAddress put(const Bytes& blob) {
        ContentAddress addr = address_of(blob);
        std::lock_guard<std::mutex> lock(mu_);
        auto [it, inserted] = objects_.emplace(addr, blob);
        if (inserted && dir_) {
            std::ofstream out(*dir_ / "objects" / addr.hex(), std::ios::binary);
            out.write(reinterpret_cast<const char*>(blob.data()), std::streamsize(blob.size()));
        }
        return addr;
    }

    Bytes get(const ContentAddress& addr) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = objects_.find(addr);
        if (it == objects_.end()) throw IntegrityError("unknown object");
        if (address_of(it->second) != addr)
            throw IntegrityError("stored object does not match its address");
        return it->second;
    }

    bool has(const ContentAddress& addr) const {
        std::lock_guard<std::mutex> lock(mu_);
        return objects_.count(addr) != 0;
    }

    /* Accepts a pointer only if the signature verifies for the claimed owner
     * and the sequence number strictly advances that owner's log. Updates for
     * one owner are linearized: the log lock is held across the check and
     * the append. */
    void publish(const NamePointer& p) {
        if (!verify_name_update(p.owner_pk, p.target, p.sequence, p.sig))
            throw Unauthorized("name update signature does not verify");
        std::lock_guard<std::mutex> lock(mu_);
        auto& log = names_[p.owner_pk];
        if (!log.empty() && p.sequence <= log.back().sequence)
            throw StaleUpdate("sequence number does not advance");
        log.push_back(p);
        if (dir_) {
            std::ofstream out(*dir_ / "names" / (std::to_string(p.owner_pk) + ".log"),
                              std::ios::app);
            out << to_hex(p.serialize()) << "\n";
        }
    }

    std::optional<NamePointer> resolve(uint64_t owner_pk) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = names_.find(owner_pk);
        if (it == names_.end() || it->second.empty()) return std::nullopt;
        return it->second.back();
    }

    std::vector<NamePointer> name_log(uint64_t owner_pk) const {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = names_.find(owner_pk);
        return it == names_.end() ? std::vector<NamePointer>{} : it->second;
    }

    size_t object_count() const {
        std::lock_guard<std::mutex> lock(mu_);
        return objects_.size();
    }

  private:
    void replay_publish(const NamePointer& p) {
        if (!verify_name_update(p.owner_pk, p.target, p.sequence, p.sig))
            throw Unauthorized("name update signature does not verify");
        auto& log = names_[p.owner_pk];
        if (!log.empty() && p.sequence <= log.back().sequence)
            throw StaleUpdate("sequence number does not advance");
        log.push_back(p);
    }

    mutable std::mutex mu_;
    std::optional<std::filesystem::path> dir_;
    std::map<ContentAddress, Bytes> objects_;
    std::map<uint64_t, std::vector<NamePointer>> names_;
};

} // namespace zkadmit::store
