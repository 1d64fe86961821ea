#pragma once

#include <set>

#include "hash.hpp"

namespace zkadmit::mlsags {

/* Linkable ring signatures (single-layer LSAG) over a Schnorr group: the
 * order-ρ subgroup of Z_P^* for the safe prime P = 2ρ + 1. Group elements
 * are single words; H_p maps into the subgroup by squaring (cofactor 2). */
inline constexpr uint64_t kGroupP = 9223376434901288879ULL;
inline constexpr uint64_t kGroupOrder = 4611688217450644439ULL; // ρ = (P-1)/2, prime
inline constexpr uint64_t kGroupGen = 25;                       // 5², order ρ

inline uint64_t group_mul(uint64_t a, uint64_t b) {
    return uint64_t((unsigned __int128)a * b % kGroupP);
}

inline uint64_t group_pow(uint64_t a, uint64_t e) {
    uint64_t r = 1;
    a %= kGroupP;
    while (e) {
        if (e & 1) r = group_mul(r, a);
        a = group_mul(a, a);
        e >>= 1;
    }
    return r;
}

inline uint64_t scalar_mod(uint64_t a) { return a % kGroupOrder; }

inline uint64_t scalar_mul(uint64_t a, uint64_t b) {
    return uint64_t((unsigned __int128)a * b % kGroupOrder);
}

inline uint64_t scalar_sub(uint64_t a, uint64_t b) {
    a = scalar_mod(a);
    b = scalar_mod(b);
    return a >= b ? a - b : a + (kGroupOrder - b);
}

/* Wide-reduce a digest into [0, m). */
inline uint64_t digest_mod(const Digest& d, uint64_t m) {
    unsigned __int128 acc = 0;
    for (int i = 0; i < 32; i++) acc = (acc << 8 | d[i]) % m;
    return uint64_t(acc);
}

/* Deterministic hash-to-subgroup: hash candidates until nonzero, then square
 * to land in the order-ρ subgroup (rejecting the identity). */
inline uint64_t hash_to_group(const Bytes& input) {
    for (uint64_t ctr = 0;; ctr++) {
        Bytes b = input;
        put_u64(b, ctr);
        uint64_t cand = digest_mod(hash_tagged("lsag-hash-to-group", b), kGroupP);
        if (cand == 0) continue;
        uint64_t x = group_mul(cand, cand);
        if (x != 1) return x;
    }
}

struct SeedKeyPair {
    uint64_t sk = 0; // scalar mod ρ
    uint64_t pk = 0; // kGroupGen^sk
};

inline SeedKeyPair lrs_keygen(RandomStream& rng) {
    SeedKeyPair kp;
    kp.sk = 1 + rng.uniform(kGroupOrder - 1);
    kp.pk = group_pow(kGroupGen, kp.sk);
    return kp;
}

inline Bytes group_bytes(uint64_t g) {
    Bytes b;
    put_u64(b, g);
    return b;
}

/* y0 = H_p(pk)^sk — per-keypair deterministic, independent of message/ring. */
inline uint64_t key_image(const SeedKeyPair& kp) {
    return group_pow(hash_to_group(group_bytes(kp.pk)), kp.sk);
}

struct RingSignature {
    uint64_t y0 = 0;          // key image
    uint64_t c0 = 0;          // chain seed challenge
    std::vector<uint64_t> s;  // one response per ring member
    Digest ring_digest{};

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, y0);
        put_u64(b, c0);
        put_u64_vec(b, s);
        put_digest(b, ring_digest);
        return b;
    }
};

inline Digest ring_key_digest(const std::vector<uint64_t>& ring) {
    Bytes b;
    put_u64_vec(b, ring);
    return hash_tagged("lsag-ring", b);
}

namespace detail {

inline uint64_t chain_challenge(const Digest& ring_digest, uint64_t y0, const Bytes& msg,
                                uint64_t z1, uint64_t z2) {
    Bytes b;
    put_digest(b, ring_digest);
    put_u64(b, y0);
    put_bytes(b, msg);
    put_u64(b, z1);
    put_u64(b, z2);
    return digest_mod(hash_tagged("lsag-chain", b), kGroupOrder);
}

} // namespace detail

inline RingSignature lrs_sign(const Bytes& msg, const std::vector<uint64_t>& ring,
                              size_t signer_index, uint64_t sk, RandomStream& rng) {
    size_t n = ring.size();
    if (n == 0 || signer_index >= n) throw SignerNotInRing("signer index out of range");
    if (group_pow(kGroupGen, scalar_mod(sk)) != ring[signer_index])
        throw SignerNotInRing("secret key does not match ring slot");
    if (std::set<uint64_t>(ring.begin(), ring.end()).size() != n)
        throw DuplicateRingKey();

    std::vector<uint64_t> hp(n);
    for (size_t i = 0; i < n; i++) hp[i] = hash_to_group(group_bytes(ring[i]));
    uint64_t y0 = group_pow(hp[signer_index], sk);
    Digest rd = ring_key_digest(ring);

    std::vector<uint64_t> c(n, 0), s(n, 0);
    uint64_t u = rng.uniform(kGroupOrder);
    c[(signer_index + 1) % n] = detail::chain_challenge(
        rd, y0, msg, group_pow(kGroupGen, u), group_pow(hp[signer_index], u));
    for (size_t k = 1; k < n; k++) {
        size_t i = (signer_index + k) % n;
        s[i] = rng.uniform(kGroupOrder);
        uint64_t z1 = group_mul(group_pow(kGroupGen, s[i]), group_pow(ring[i], c[i]));
        uint64_t z2 = group_mul(group_pow(hp[i], s[i]), group_pow(y0, c[i]));
        c[(i + 1) % n] = detail::chain_challenge(rd, y0, msg, z1, z2);
    }
    s[signer_index] = scalar_sub(u, scalar_mul(c[signer_index], scalar_mod(sk)));

    RingSignature sig;
    sig.y0 = y0;
    sig.c0 = c[0];
    sig.s = s;
    sig.ring_digest = rd;
    return sig;
}

inline bool lrs_verify(const Bytes& msg, const std::vector<uint64_t>& ring,
                       const RingSignature& sig) {
    size_t n = ring.size();
    if (n == 0 || sig.s.size() != n) return false;
    if (ring_key_digest(ring) != sig.ring_digest) return false;
    if (sig.y0 == 0 || sig.y0 == 1) return false;
    uint64_t c = sig.c0;
    for (size_t i = 0; i < n; i++) {
        uint64_t hpi = hash_to_group(group_bytes(ring[i]));
        uint64_t z1 = group_mul(group_pow(kGroupGen, sig.s[i]), group_pow(ring[i], c));
        uint64_t z2 = group_mul(group_pow(hpi, sig.s[i]), group_pow(sig.y0, c));
        c = detail::chain_challenge(sig.ring_digest, sig.y0, msg, z1, z2);
    }
    return c == sig.c0;
}

/* Linking depends on key images alone. */
inline bool lrs_link(const RingSignature& s1, const RingSignature& s2) {
    return s1.y0 == s2.y0;
}

} // namespace zkadmit::mlsags
