#pragma once

#include <cstdint>

#include "base.hpp"
#include "hash.hpp"

namespace zkadmit::algebra {

/* Default protocol field: the 64-bit prime 2^64 - 2^32 + 1. Single-word
 * arithmetic with a dedicated 128->64 bit reduction. */
inline constexpr uint64_t kDefaultP = 18446744069414584321ULL;

/* Generator of the multiplicative subgroup of order 65537 of F_p for the
 * default p (= 7^((p-1)/65537) mod p). Basis of the toy in-circuit
 * signature scheme; 65537 is the largest prime factor of p-1. */
inline constexpr uint64_t kSubgroupGen = 8478886009461009681ULL;
inline constexpr uint64_t kSubgroupOrder = 65537;

namespace detail {

/* Reduce a 128-bit value modulo 2^64 - 2^32 + 1 using
 * 2^64 ≡ 2^32 - 1 and 2^96 ≡ -1 (mod p). */
inline uint64_t reduce_goldilocks(unsigned __int128 x) {
    constexpr uint64_t P = kDefaultP;
    uint64_t lo = uint64_t(x);
    uint64_t hi = uint64_t(x >> 64);
    uint64_t mid = hi & 0xffffffffULL; // bits 64..95
    uint64_t top = hi >> 32;           // bits 96..127
    // x ≡ lo + mid*(2^32 - 1) - top
    uint64_t t0 = lo - top;
    if (lo < top) t0 += P; // borrow
    uint64_t t1 = (mid << 32) - mid;   // < 2^64, no overflow since mid < 2^32
    uint64_t r = t0 + t1;
    if (r < t0 || r >= P) r -= P;      // at most one correction needed twice
    if (r >= P) r -= P;
    return r;
}

} // namespace detail

/* Prime-field context with a runtime modulus (values are plain uint64_t
 * residues). All protocol arithmetic over F_p goes through one of these. */
struct Field {
    uint64_t p = kDefaultP;

    explicit Field(uint64_t modulus = kDefaultP) : p(modulus) {
        if (p < 2) throw InvalidParams("field modulus too small");
    }

    bool operator==(const Field& o) const { return p == o.p; }

    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t s = a + b;
        if (s < a || s >= p) s -= p;
        return s;
    }
    uint64_t sub(uint64_t a, uint64_t b) const {
        return a >= b ? a - b : a + (p - b);
    }
    uint64_t neg(uint64_t a) const { return a == 0 ? 0 : p - a; }
    uint64_t mul(uint64_t a, uint64_t b) const {
        unsigned __int128 x = (unsigned __int128)a * b;
        if (p == kDefaultP) return detail::reduce_goldilocks(x);
        return uint64_t(x % p);
    }
    uint64_t pow(uint64_t a, uint64_t e) const {
        uint64_t r = 1 % p, base = a % p;
        while (e) {
            if (e & 1) r = mul(r, base);
            base = mul(base, base);
            e >>= 1;
        }
        return r;
    }
    /* Requires p prime (Fermat inversion). */
    uint64_t inv(uint64_t a) const {
        if (a % p == 0) throw DivisionByZero();
        return pow(a, p - 2);
    }
    uint64_t reduce(uint64_t a) const { return a % p; }

    uint64_t sample(RandomStream& rng) const { return rng.uniform(p); }

    /* Wide reduction of a 256-bit digest into [0, p): bias < 2^-192. */
    uint64_t from_digest(const Digest& d) const {
        uint64_t r = 0;
        for (int i = 0; i < 32; i++) {
            // r = r*256 + byte, mod p
            r = mul(r, 256);
            r = add(r, d[i] % p);
        }
        return r;
    }
};

using FieldVec = std::vector<uint64_t>;

inline FieldVec vec_add(const Field& f, const FieldVec& a, const FieldVec& b) {
    if (a.size() != b.size()) throw ParamMismatch("vector length");
    FieldVec r(a.size());
    for (size_t i = 0; i < a.size(); i++) r[i] = f.add(a[i], b[i]);
    return r;
}

inline FieldVec vec_scale(const Field& f, uint64_t s, const FieldVec& a) {
    FieldVec r(a.size());
    for (size_t i = 0; i < a.size(); i++) r[i] = f.mul(s, a[i]);
    return r;
}

/* a + s*b, the fold primitive. */
inline FieldVec vec_fma(const Field& f, const FieldVec& a, uint64_t s, const FieldVec& b) {
    if (a.size() != b.size()) throw ParamMismatch("vector length");
    FieldVec r(a.size());
    for (size_t i = 0; i < a.size(); i++) r[i] = f.add(a[i], f.mul(s, b[i]));
    return r;
}

/* Montgomery arithmetic for an odd modulus < 2^63; the workhorse of the
 * RNS ciphertext arithmetic (residues stored in plain form; REDC used for
 * products with a deferred R-factor fix, see callers). */
struct MontgomeryModulus {
    uint64_t m = 0;
    uint64_t m_inv_neg = 0; // -m^{-1} mod 2^64
    uint64_t r2 = 0;        // 2^128 mod m

    MontgomeryModulus() = default;
    explicit MontgomeryModulus(uint64_t modulus) : m(modulus) {
        if (!(m & 1) || m >= (1ULL << 63) || m < 3)
            throw InvalidParams("modulus must be odd and < 2^63");
        // Newton iteration for m^{-1} mod 2^64
        uint64_t inv = m;
        for (int i = 0; i < 5; i++) inv *= 2 - m * inv;
        m_inv_neg = ~inv + 1;
        unsigned __int128 r = 1;
        for (int i = 0; i < 128; i++) {
            r <<= 1;
            if (r >= m) r -= m;
        }
        r2 = uint64_t(r);
    }

    /* REDC: returns x * 2^-64 mod m for x < 2^64 * m. */
    uint64_t redc(unsigned __int128 x) const {
        uint64_t q = uint64_t(x) * m_inv_neg;
        unsigned __int128 t = x + (unsigned __int128)q * m;
        uint64_t r = uint64_t(t >> 64);
        return r >= m ? r - m : r;
    }

    uint64_t mul(uint64_t a, uint64_t b) const {
        // two REDCs: (a*b*R^-1) * R2 * R^-1 = a*b mod m
        return redc((unsigned __int128)redc((unsigned __int128)a * b) * r2);
    }
    uint64_t add(uint64_t a, uint64_t b) const {
        uint64_t s = a + b;
        return s >= m ? s - m : s;
    }
    uint64_t sub(uint64_t a, uint64_t b) const {
        return a >= b ? a - b : a + (m - b);
    }
    uint64_t reduce(uint64_t a) const { return a % m; }
    uint64_t reduce128(unsigned __int128 x) const {
        // x = hi*2^64 + lo = REDC(x)*2^64 mod ... use redc then scale by R2
        return mul_by_r(redc(x));
    }
    /* y * 2^64 mod m */
    uint64_t mul_by_r(uint64_t y) const { return redc((unsigned __int128)y * r2); }
};

} // namespace zkadmit::algebra
