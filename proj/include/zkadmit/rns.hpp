#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "ring.hpp"

namespace zkadmit::mkhe {

using algebra::MontgomeryModulus;
using algebra::RingElement;
using boost::multiprecision::cpp_int;

inline constexpr int kErrBound = 4;    // fresh errors drawn from [-4, 4]
inline constexpr int kSmudgeBits = 230; // flooding noise magnitude for shares

/* Residue number system for the ciphertext modulus q = Π q_i. Polynomials
 * live in Z_q[X]/(X^n + 1) and are stored as per-prime residue blocks; wide
 * integers appear only at key moments (CRT reconstruction, smudge powers). */
struct RnsContext {
    std::vector<uint64_t> primes;
    std::vector<MontgomeryModulus> mont;
    size_t n = 0;
    uint64_t t = 0; // plaintext modulus
    cpp_int q;
    cpp_int q_half;
    std::vector<cpp_int> q_over;           // q / q_i
    std::vector<uint64_t> q_over_inv;      // (q / q_i)^{-1} mod q_i
    std::vector<uint64_t> t_res;           // t mod q_i
    std::vector<std::array<uint64_t, 3>> smudge_pow; // 2^58, 2^116, 2^174 mod q_i
    double log2_q = 0;

    RnsContext() = default;

    RnsContext(const std::vector<uint64_t>& qprimes, size_t ring_n, uint64_t plain_t)
        : primes(qprimes), n(ring_n), t(plain_t) {
        if (primes.empty()) throw InvalidParams("empty ciphertext modulus");
        q = 1;
        for (uint64_t p : primes) {
            mont.emplace_back(p);
            q *= p;
            log2_q += std::log2(double(p));
        }
        q_half = q >> 1;
        for (size_t i = 0; i < primes.size(); i++) {
            q_over.push_back(q / primes[i]);
            uint64_t r = (q_over[i] % primes[i]).convert_to<uint64_t>();
            q_over_inv.push_back(inv_mod(r, primes[i]));
            t_res.push_back(t % primes[i]);
            std::array<uint64_t, 3> pw;
            for (int j = 0; j < 3; j++)
                pw[j] = ((cpp_int(1) << (58 * (j + 1))) % primes[i]).convert_to<uint64_t>();
            smudge_pow.push_back(pw);
        }
    }

    size_t np() const { return primes.size(); }
    size_t len() const { return primes.size() * n; }

    static uint64_t inv_mod(uint64_t a, uint64_t p) {
        if (a == 0) throw DivisionByZero("inverse of zero residue");
        uint64_t r = 1, b = a, e = p - 2;
        while (e) {
            if (e & 1) r = uint64_t((unsigned __int128)r * b % p);
            b = uint64_t((unsigned __int128)b * b % p);
            e >>= 1;
        }
        return r;
    }
};

/* Flat layout: poly[i * n + c] is coefficient c modulo primes[i]. */
using RnsPoly = std::vector<uint64_t>;

inline RnsPoly rns_zero(const RnsContext& rc) { return RnsPoly(rc.len(), 0); }

inline RnsPoly rns_add(const RnsContext& rc, const RnsPoly& a, const RnsPoly& b) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++)
            r[i * rc.n + c] = rc.mont[i].add(a[i * rc.n + c], b[i * rc.n + c]);
    return r;
}

inline void rns_add_in(const RnsContext& rc, RnsPoly& a, const RnsPoly& b) {
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++)
            a[i * rc.n + c] = rc.mont[i].add(a[i * rc.n + c], b[i * rc.n + c]);
}

inline RnsPoly rns_neg(const RnsContext& rc, const RnsPoly& a) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) r[i * rc.n + c] = rc.mont[i].sub(0, a[i * rc.n + c]);
    return r;
}

/* Per-prime residues of an arbitrary 64-bit value. */
inline std::vector<uint64_t> rns_lift(const RnsContext& rc, uint64_t v) {
    std::vector<uint64_t> r(rc.np());
    for (size_t i = 0; i < rc.np(); i++) r[i] = v % rc.primes[i];
    return r;
}

inline RnsPoly rns_scalar_mul(const RnsContext& rc, const std::vector<uint64_t>& s,
                              const RnsPoly& a) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) r[i * rc.n + c] = rc.mont[i].mul(a[i * rc.n + c], s[i]);
    return r;
}

/* a += s * b */
inline void rns_fma_in(const RnsContext& rc, RnsPoly& a, const std::vector<uint64_t>& s,
                       const RnsPoly& b) {
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++)
            a[i * rc.n + c] = rc.mont[i].add(a[i * rc.n + c], rc.mont[i].mul(b[i * rc.n + c], s[i]));
}

/* Negacyclic product. Inner products accumulate REDC residues (each < q_i)
 * in 128-bit sums, so one deferred Montgomery fix per output coefficient
 * restores the plain representation. */
inline RnsPoly rns_mul(const RnsContext& rc, const RnsPoly& a, const RnsPoly& b) {
    RnsPoly r(rc.len());
    size_t n = rc.n;
    for (size_t i = 0; i < rc.np(); i++) {
        const MontgomeryModulus& mm = rc.mont[i];
        const uint64_t* pa = &a[i * n];
        const uint64_t* pb = &b[i * n];
        uint64_t* pr = &r[i * n];
        for (size_t k = 0; k < n; k++) {
            unsigned __int128 pos = 0, neg = 0;
            for (size_t ii = 0; ii < n; ii++) {
                size_t jj = (k + n - ii) & (n - 1);
                uint64_t prod = mm.redc((unsigned __int128)pa[ii] * pb[jj]);
                if (ii <= k)
                    pos += prod;
                else
                    neg += prod;
            }
            uint64_t v = mm.sub(mm.reduce128(pos), mm.reduce128(neg));
            pr[k] = mm.mul_by_r(v); // undo the R^-1 left by the per-term REDCs
        }
    }
    return r;
}

inline void rns_mul_acc(const RnsContext& rc, RnsPoly& acc, const RnsPoly& a, const RnsPoly& b) {
    rns_add_in(rc, acc, rns_mul(rc, a, b));
}

/* Small signed polynomial (secrets, errors): the same integer coefficient is
 * reduced into every prime so the CRT value is the intended small integer. */
inline RnsPoly rns_from_signed(const RnsContext& rc, const std::vector<int64_t>& coeffs) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) {
            int64_t v = coeffs[c];
            r[i * rc.n + c] = v >= 0 ? uint64_t(v) % rc.primes[i]
                                     : rc.primes[i] - uint64_t(-v) % rc.primes[i];
        }
    return r;
}

/* Plaintext ring element (coefficients in [0, t)) lifted into the RNS. */
inline RnsPoly rns_from_ring(const RnsContext& rc, const RingElement& m) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) r[i * rc.n + c] = m[c] % rc.primes[i];
    return r;
}

inline std::vector<int64_t> sample_ternary(const RnsContext& rc, RandomStream& rng) {
    std::vector<int64_t> c(rc.n);
    for (auto& v : c) v = int64_t(rng.uniform(3)) - 1;
    return c;
}

inline std::vector<int64_t> sample_err(const RnsContext& rc, RandomStream& rng) {
    std::vector<int64_t> c(rc.n);
    for (auto& v : c) v = int64_t(rng.uniform(2 * kErrBound + 1)) - kErrBound;
    return c;
}

inline RnsPoly rns_sample_uniform(const RnsContext& rc, RandomStream& rng) {
    RnsPoly r(rc.len());
    for (size_t i = 0; i < rc.np(); i++)
        for (size_t c = 0; c < rc.n; c++) r[i * rc.n + c] = rng.uniform(rc.primes[i]);
    return r;
}

/* Uniform flooding noise in [-(2^230 - 1), 2^230 - 1], assembled from four
 * masked words so no wide-integer arithmetic touches the hot path. */
inline RnsPoly rns_sample_smudge(const RnsContext& rc, RandomStream& rng) {
    RnsPoly r(rc.len());
    constexpr uint64_t kMask58 = (1ULL << 58) - 1;
    constexpr uint64_t kMask56 = (1ULL << 56) - 1;
    for (size_t c = 0; c < rc.n; c++) {
        uint64_t w0 = rng.next_u64() & kMask58;
        uint64_t w1 = rng.next_u64() & kMask58;
        uint64_t w2 = rng.next_u64() & kMask58;
        uint64_t w3 = rng.next_u64() & kMask56;
        bool negate = rng.next_u64() & 1;
        for (size_t i = 0; i < rc.np(); i++) {
            const auto& pw = rc.smudge_pow[i];
            unsigned __int128 acc = w0;
            acc += (unsigned __int128)w1 * pw[0];
            acc += (unsigned __int128)w2 * pw[1];
            acc += (unsigned __int128)w3 * pw[2];
            uint64_t v = uint64_t(acc % rc.primes[i]);
            r[i * rc.n + c] = negate ? rc.mont[i].sub(0, v) : v;
        }
    }
    return r;
}

/* t * e for a small signed error polynomial. */
inline RnsPoly rns_scaled_err(const RnsContext& rc, RandomStream& rng) {
    return rns_scalar_mul(rc, rc.t_res, rns_from_signed(rc, sample_err(rc, rng)));
}

/* CRT reconstruction of one coefficient into [0, q). */
inline cpp_int crt_coeff(const RnsContext& rc, const RnsPoly& p, size_t c) {
    cpp_int x = 0;
    for (size_t i = 0; i < rc.np(); i++) {
        uint64_t ri = p[i * rc.n + c];
        uint64_t s = uint64_t((unsigned __int128)ri * rc.q_over_inv[i] % rc.primes[i]);
        x += rc.q_over[i] * s;
    }
    return x % rc.q;
}

/* Full decode: CRT, centered lift, reduce mod t. Exact as long as the true
 * payload magnitude stays below q/2. */
inline RingElement rns_to_ring(const RnsContext& rc, const RnsPoly& p) {
    RingElement m(rc.n);
    cpp_int tt = rc.t;
    for (size_t c = 0; c < rc.n; c++) {
        cpp_int x = crt_coeff(rc, p, c);
        if (x > rc.q_half) x -= rc.q;
        cpp_int r = x % tt;
        if (r < 0) r += tt;
        m[c] = r.convert_to<uint64_t>();
    }
    return m;
}

} // namespace zkadmit::mkhe
