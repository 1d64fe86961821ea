#pragma once

#include <array>
#include <openssl/evp.h>

#include "base.hpp"

namespace zkadmit {

using Digest = std::array<uint8_t, 32>;

inline Digest sha256(const uint8_t* data, size_t len) {
    Digest out{};
    unsigned int n = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data, len) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &n) != 1 || n != 32) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 failure");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

inline Digest sha256(const Bytes& b) { return sha256(b.data(), b.size()); }

/* Domain-separated hash: digest over (tag-length ‖ tag ‖ payload). Every use
 * of the hash in the protocol goes through a distinct tag. */
inline Digest hash_tagged(const std::string& tag, const Bytes& payload) {
    Bytes buf;
    put_str(buf, tag);
    buf.insert(buf.end(), payload.begin(), payload.end());
    return sha256(buf);
}

inline Bytes digest_bytes(const Digest& d) { return Bytes(d.begin(), d.end()); }

inline void put_digest(Bytes& out, const Digest& d) {
    out.insert(out.end(), d.begin(), d.end());
}

inline Digest read_digest(ByteReader& r) {
    r.need(32);
    Digest d{};
    std::memcpy(d.data(), r.buf.data() + r.pos, 32);
    r.pos += 32;
    return d;
}

inline std::string digest_hex(const Digest& d) {
    return to_hex(Bytes(d.begin(), d.end()));
}

/* Counter-mode expansion of a seed into an arbitrary-length byte stream:
 * block_i = SHA256(tag ‖ seed ‖ i). Used for commitment-matrix expansion and
 * for all deterministic randomness in the simulator. */
inline Bytes expand_bytes(const std::string& tag, const Bytes& seed, size_t len) {
    Bytes out;
    out.reserve(len + 32);
    uint64_t counter = 0;
    while (out.size() < len) {
        Bytes block;
        put_str(block, tag);
        put_bytes(block, seed);
        put_u64(block, counter++);
        Digest d = sha256(block);
        out.insert(out.end(), d.begin(), d.end());
    }
    out.resize(len);
    return out;
}

/* Deterministic random stream (counter-mode over SHA-256). Not a DRBG for
 * production use; the simulator needs reproducibility above all. */
class RandomStream {
public:
    RandomStream(const Bytes& seed, const std::string& label) {
        Bytes buf;
        put_bytes(buf, seed);
        put_str(buf, label);
        key_ = sha256(buf);
    }

    /* Derive an independent child stream. */
    RandomStream fork(const std::string& label) const {
        return RandomStream(Bytes(key_.begin(), key_.end()), label);
    }

    uint64_t next_u64() {
        if (have_ == 0) refill();
        uint64_t v = 0;
        std::memcpy(&v, block_.data() + (32 - have_), 8);
        have_ -= 8;
        return v;
    }

    /* Uniform in [0, bound) via rejection sampling. */
    uint64_t uniform(uint64_t bound) {
        if (bound == 0) throw InvalidParams("uniform(0)");
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        for (;;) {
            uint64_t v = next_u64();
            if (v < limit) return v % bound;
        }
    }

    Bytes bytes(size_t n) {
        Bytes out(n);
        for (size_t i = 0; i < n; i++) out[i] = uint8_t(next_u64());
        return out;
    }

private:
    void refill() {
        Bytes buf(key_.begin(), key_.end());
        put_u64(buf, counter_++);
        block_ = sha256(buf);
        have_ = 32;
    }

    Digest key_{};
    Digest block_{};
    uint64_t counter_ = 0;
    size_t have_ = 0;
};

} // namespace zkadmit
