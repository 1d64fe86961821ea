#pragma once

#include <cmath>

#include "field.hpp"

namespace zkadmit::algebra {

/* Plaintext ring R_t = Z_t[X]/(X^n + 1), n a power of two. Elements are
 * coefficient vectors of length exactly n, each in [0, t). */
struct RingParams {
    uint64_t t = kDefaultP;
    size_t n = 8;
    Field ft{kDefaultP}; // arithmetic mod t

    RingParams() = default;
    RingParams(uint64_t t_, size_t n_) : t(t_), n(n_), ft(t_) {
        if (n == 0 || (n & (n - 1)) != 0)
            throw InvalidParams("ring dimension must be a power of two");
    }
    bool operator==(const RingParams& o) const { return t == o.t && n == o.n; }
};

using RingElement = std::vector<uint64_t>;

inline void check_dims(const RingParams& rp, const RingElement& a) {
    if (a.size() != rp.n) throw ParamMismatch("ring element dimension");
}

inline RingElement ring_zero(const RingParams& rp) { return RingElement(rp.n, 0); }

inline RingElement ring_one(const RingParams& rp) {
    RingElement e(rp.n, 0);
    e[0] = 1;
    return e;
}

/* Constant-coefficient lift of a field element: the canonical embedding
 * F_p -> R_t (injective ring homomorphism when t = p). */
inline RingElement embed(const RingParams& rp, uint64_t f) {
    RingElement e(rp.n, 0);
    e[0] = f % rp.t;
    return e;
}

inline RingElement ring_add(const RingParams& rp, const RingElement& a, const RingElement& b) {
    check_dims(rp, a);
    check_dims(rp, b);
    RingElement c(rp.n);
    for (size_t i = 0; i < rp.n; i++) c[i] = rp.ft.add(a[i], b[i]);
    return c;
}

inline RingElement ring_sub(const RingParams& rp, const RingElement& a, const RingElement& b) {
    check_dims(rp, a);
    check_dims(rp, b);
    RingElement c(rp.n);
    for (size_t i = 0; i < rp.n; i++) c[i] = rp.ft.sub(a[i], b[i]);
    return c;
}

inline RingElement ring_neg(const RingParams& rp, const RingElement& a) {
    check_dims(rp, a);
    RingElement c(rp.n);
    for (size_t i = 0; i < rp.n; i++) c[i] = rp.ft.neg(a[i]);
    return c;
}

/* Negacyclic schoolbook product: X^n ≡ -1. */
inline RingElement ring_mul(const RingParams& rp, const RingElement& a, const RingElement& b) {
    check_dims(rp, a);
    check_dims(rp, b);
    RingElement c(rp.n, 0);
    for (size_t i = 0; i < rp.n; i++) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < rp.n; j++) {
            uint64_t prod = rp.ft.mul(a[i], b[j]);
            size_t k = i + j;
            if (k < rp.n)
                c[k] = rp.ft.add(c[k], prod);
            else
                c[k - rp.n] = rp.ft.sub(c[k - rp.n], prod);
        }
    }
    return c;
}

inline RingElement ring_scalar_mul(const RingParams& rp, uint64_t s, const RingElement& a) {
    check_dims(rp, a);
    RingElement c(rp.n);
    uint64_t sr = s % rp.t;
    for (size_t i = 0; i < rp.n; i++) c[i] = rp.ft.mul(sr, a[i]);
    return c;
}

inline RingElement ring_sample(const RingParams& rp, RandomStream& rng) {
    RingElement e(rp.n);
    for (size_t i = 0; i < rp.n; i++) e[i] = rng.uniform(rp.t);
    return e;
}

inline void put_ring(Bytes& out, const RingElement& a) { put_u64_vec(out, a); }

inline RingElement read_ring(ByteReader& r, const RingParams& rp) {
    RingElement e = r.u64_vec();
    check_dims(rp, e);
    for (uint64_t c : e)
        if (c >= rp.t) throw IntegrityError("ring coefficient out of range");
    return e;
}

/* Full protocol parameter set. q (the ciphertext modulus) is represented by
 * its residue-number-system prime factorization; all ciphertext arithmetic
 * is per-prime and q itself is only materialized at decryption. */
struct AlgebraParams {
    uint64_t p = kDefaultP;
    uint64_t t = kDefaultP;
    size_t n = 8;
    std::vector<uint64_t> q_primes = default_q_primes();

    static std::vector<uint64_t> default_q_primes() {
        /* Eight fixed 63-bit primes; product ≈ 2^496. Sized so the worst
         * tracked bound — the committed cross-term late in an eight-user
         * batch, about 2^427 — clears the decryption budget with margin. */
        return {4611703610613432439ULL, 4611721202799476749ULL,
                4611738794985521189ULL, 4611756387171565609ULL,
                4611773979357610007ULL, 4611791571543654403ULL,
                4611809163729698891ULL, 4611826755915743389ULL};
    }

    void validate() const {
        if (p < 2) throw InvalidParams("p");
        if (t < p || t % p != 0) throw InvalidParams("t must be a multiple of p");
        if (n == 0 || (n & (n - 1)) != 0) throw InvalidParams("n must be a power of two");
        if (q_primes.empty()) throw InvalidParams("q empty");
        double qbits = 0;
        for (uint64_t q : q_primes) {
            if (q < 3 || !(q & 1) || q >= (1ULL << 63)) throw InvalidParams("q prime range");
            if (q == t) throw InvalidParams("q prime equals t");
            qbits += std::log2(double(q));
        }
        if (qbits < 66) throw InvalidParams("q must exceed t"); // q > t with headroom
    }

    Field field() const { return Field(p); }
    RingParams ring() const { return RingParams(t, n); }

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, p);
        put_u64(b, t);
        put_u64(b, n);
        put_u64_vec(b, q_primes);
        return b;
    }
};

} // namespace zkadmit::algebra
