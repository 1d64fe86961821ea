#pragma once

#include <bit>
#include <map>
#include <set>

#include "rns.hpp"

namespace zkadmit::mkhe {

using algebra::AlgebraParams;
using algebra::Field;
using algebra::FieldVec;
using algebra::RingParams;

enum class Backend : uint8_t { Transparent = 0, Rlwe = 1 };

inline double log2_add(double a, double b) {
    double hi = std::max(a, b), lo = std::min(a, b);
    if (lo - hi < -100) return hi;
    return hi + std::log2(1.0 + std::exp2(lo - hi));
}

/* Shared evaluation context: base field, plaintext ring, ciphertext RNS,
 * and the common reference polynomial every public key is built against. */
struct MkheContext {
    AlgebraParams ap;
    Field fp;
    RingParams rp;
    RnsContext rns;
    RnsPoly crs;
    Digest params_digest{};
    double fresh_log2 = 0;
    double budget_log2 = 0;
};

inline MkheContext make_context(const AlgebraParams& ap) {
    ap.validate();
    MkheContext ctx;
    ctx.ap = ap;
    ctx.fp = ap.field();
    ctx.rp = ap.ring();
    ctx.rns = RnsContext(ap.q_primes, ap.n, ap.t);
    RandomStream crs_rng(ap.serialize(), "mkhe-crs");
    ctx.crs = rns_sample_uniform(ctx.rns, crs_rng);
    ctx.params_digest = hash_tagged("mkhe-params", ap.serialize());
    ctx.fresh_log2 = std::log2(double(ap.t)) + std::log2(1.0 + kErrBound * (2.0 * ap.n + 1));
    ctx.budget_log2 = ctx.rns.log2_q - 1; // decoding is exact below q/2
    return ctx;
}

struct MkhePublicKey {
    Backend backend = Backend::Transparent;
    uint64_t party_id = 0;
    Digest params_digest{};
    RnsPoly b; // empty for the transparent backend
};

struct MkheKeyPair {
    Backend backend = Backend::Transparent;
    uint64_t party_id = 0;
    Bytes sk_seed; // secret: all key material derives from it
    RnsPoly s;     // secret: empty for the transparent backend
    MkhePublicKey pub;
};

/* All key material is a deterministic function of the secret seed, so the
 * public key can always be recomputed from the secret side. */
inline MkheKeyPair derive_keypair(const MkheContext& ctx, Backend backend, uint64_t party_id,
                                  const Bytes& sk_seed) {
    MkheKeyPair kp;
    kp.backend = backend;
    kp.party_id = party_id;
    kp.sk_seed = sk_seed;
    kp.pub.backend = backend;
    kp.pub.party_id = party_id;
    kp.pub.params_digest = ctx.params_digest;
    if (backend == Backend::Rlwe) {
        if (ctx.ap.t != ctx.ap.p)
            throw InvalidParams("ciphertext backend requires plaintext modulus equal to field modulus");
        RandomStream ks(sk_seed, "mkhe-sk");
        kp.s = rns_from_signed(ctx.rns, sample_ternary(ctx.rns, ks));
        kp.pub.b = rns_add(ctx.rns, rns_neg(ctx.rns, rns_mul(ctx.rns, ctx.crs, kp.s)),
                           rns_scaled_err(ctx.rns, ks));
    }
    return kp;
}

inline MkheKeyPair keygen(const MkheContext& ctx, Backend backend, uint64_t party_id,
                          RandomStream& rng) {
    return derive_keypair(ctx, backend, party_id, rng.bytes(32));
}

/* Ciphertext under a set of parties. Payload polynomials are indexed by
 * monomials in the parties' secrets: (0,0) is the constant term, (0,j) the
 * coefficient of s_j, and (a,b) with 1 <= a <= b the coefficient of
 * s_a * s_b (positions into the sorted key set). Degree-one ciphertexts use
 * only (0,*) monomials; one multiplication yields degree two. The monomial
 * bookkeeping, levels, and the noise model run identically for both
 * backends so failure behavior matches. */
struct MultiKeyCiphertext {
    Backend backend = Backend::Transparent;
    Digest params_digest{};
    std::vector<uint64_t> key_set; // sorted, unique party ids
    uint32_t level = 0;
    size_t plain_len = 0;
    double noise_log2 = 0;
    std::vector<std::pair<uint32_t, uint32_t>> monomials; // sorted
    std::vector<std::vector<RnsPoly>> data;               // [monomial][slot]
    std::vector<RingElement> plain;                       // transparent payload

    ptrdiff_t find_mono(uint32_t a, uint32_t b) const {
        auto it = std::lower_bound(monomials.begin(), monomials.end(), std::make_pair(a, b));
        if (it == monomials.end() || *it != std::make_pair(a, b)) return -1;
        return it - monomials.begin();
    }

    Bytes serialize() const {
        Bytes out;
        put_u32(out, kEncodingVersion);
        out.push_back(uint8_t(backend));
        put_digest(out, params_digest);
        put_u64_vec(out, key_set);
        put_u32(out, level);
        put_u64(out, plain_len);
        put_u64(out, std::bit_cast<uint64_t>(noise_log2));
        put_u64(out, monomials.size());
        for (auto [a, b] : monomials) {
            put_u32(out, a);
            put_u32(out, b);
        }
        for (const auto& slots : data)
            for (const auto& p : slots) put_u64_vec(out, p);
        for (const auto& m : plain) put_u64_vec(out, m);
        return out;
    }
};

inline Digest ct_digest(const MultiKeyCiphertext& ct) {
    return hash_tagged("mkhe-ct", ct.serialize());
}

inline void check_budget(const MkheContext& ctx, const MultiKeyCiphertext& ct) {
    if (ct.noise_log2 >= ctx.budget_log2)
        throw NoiseBudgetExceeded("predicted payload bound exceeds q/2");
}

inline void check_compat(const MkheContext& ctx, const MultiKeyCiphertext& a,
                         const MultiKeyCiphertext& b) {
    if (a.backend != b.backend) throw ParamMismatch("ciphertext backend mismatch");
    if (a.params_digest != ctx.params_digest || b.params_digest != ctx.params_digest)
        throw ParamMismatch("ciphertext parameter mismatch");
}

/* Fresh encryption under a single party's key: slots are ring elements over
 * the plaintext modulus, each encrypted with independent randomness. */
inline MultiKeyCiphertext encrypt(const MkheContext& ctx, const MkhePublicKey& pub,
                                  const std::vector<RingElement>& slots, RandomStream& rng) {
    if (pub.params_digest != ctx.params_digest) throw ParamMismatch("public key parameter mismatch");
    if (slots.empty()) throw ParamMismatch("empty plaintext vector");
    MultiKeyCiphertext ct;
    ct.backend = pub.backend;
    ct.params_digest = ctx.params_digest;
    ct.key_set = {pub.party_id};
    ct.level = 0;
    ct.plain_len = slots.size();
    ct.noise_log2 = ctx.fresh_log2;
    ct.monomials = {{0, 0}, {0, 1}};
    for (const auto& m : slots)
        if (m.size() != ctx.ap.n) throw ParamMismatch("plaintext slot dimension");
    if (pub.backend == Backend::Rlwe) {
        ct.data.assign(2, std::vector<RnsPoly>(slots.size()));
        for (size_t i = 0; i < slots.size(); i++) {
            RnsPoly v = rns_from_signed(ctx.rns, sample_ternary(ctx.rns, rng));
            RnsPoly c0 = rns_mul(ctx.rns, pub.b, v);
            rns_add_in(ctx.rns, c0, rns_scaled_err(ctx.rns, rng));
            rns_add_in(ctx.rns, c0, rns_from_ring(ctx.rns, slots[i]));
            RnsPoly c1 = rns_mul(ctx.rns, ctx.crs, v);
            rns_add_in(ctx.rns, c1, rns_scaled_err(ctx.rns, rng));
            ct.data[0][i] = std::move(c0);
            ct.data[1][i] = std::move(c1);
        }
    } else {
        ct.plain = slots;
    }
    return ct;
}

inline MultiKeyCiphertext encrypt_fields(const MkheContext& ctx, const MkhePublicKey& pub,
                                         const FieldVec& vals, RandomStream& rng) {
    std::vector<RingElement> slots;
    slots.reserve(vals.size());
    for (uint64_t v : vals) slots.push_back(algebra::embed(ctx.rp, ctx.fp.reduce(v)));
    return encrypt(ctx, pub, slots, rng);
}

inline std::vector<uint64_t> union_keys(const std::vector<uint64_t>& a,
                                        const std::vector<uint64_t>& b) {
    std::vector<uint64_t> u;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(u));
    return u;
}

/* Re-index a ciphertext onto a sorted superset of its key set. The position
 * map is monotone, so monomial order is preserved. */
inline MultiKeyCiphertext align_to(const MkheContext& ctx, const MultiKeyCiphertext& ct,
                                   const std::vector<uint64_t>& ks) {
    if (ct.key_set == ks) return ct;
    std::vector<uint32_t> pos_map(ct.key_set.size() + 1, 0);
    for (size_t i = 0; i < ct.key_set.size(); i++) {
        auto it = std::lower_bound(ks.begin(), ks.end(), ct.key_set[i]);
        if (it == ks.end() || *it != ct.key_set[i])
            throw ParamMismatch("key set is not a superset");
        pos_map[i + 1] = uint32_t(it - ks.begin()) + 1;
    }
    MultiKeyCiphertext out = ct;
    out.key_set = ks;
    for (auto& [a, b] : out.monomials) {
        a = pos_map[a];
        b = pos_map[b];
    }
    (void)ctx;
    return out;
}

inline MultiKeyCiphertext eval_add(const MkheContext& ctx, const MultiKeyCiphertext& x,
                                   const MultiKeyCiphertext& y) {
    check_compat(ctx, x, y);
    if (x.plain_len != y.plain_len) throw ParamMismatch("ciphertext slot counts differ");
    std::vector<uint64_t> ks = union_keys(x.key_set, y.key_set);
    MultiKeyCiphertext a = align_to(ctx, x, ks);
    MultiKeyCiphertext b = align_to(ctx, y, ks);
    MultiKeyCiphertext out;
    out.backend = a.backend;
    out.params_digest = ctx.params_digest;
    out.key_set = ks;
    out.level = std::max(a.level, b.level);
    out.plain_len = a.plain_len;
    out.noise_log2 = log2_add(a.noise_log2, b.noise_log2);
    size_t i = 0, j = 0;
    while (i < a.monomials.size() || j < b.monomials.size()) {
        bool take_a = j == b.monomials.size() ||
                      (i < a.monomials.size() && a.monomials[i] <= b.monomials[j]);
        bool take_b = i == a.monomials.size() ||
                      (j < b.monomials.size() && b.monomials[j] <= a.monomials[i]);
        if (take_a && take_b) {
            out.monomials.push_back(a.monomials[i]);
            if (out.backend == Backend::Rlwe) {
                std::vector<RnsPoly> slots(a.plain_len);
                for (size_t s = 0; s < a.plain_len; s++)
                    slots[s] = rns_add(ctx.rns, a.data[i][s], b.data[j][s]);
                out.data.push_back(std::move(slots));
            }
            i++, j++;
        } else if (take_a) {
            out.monomials.push_back(a.monomials[i]);
            if (out.backend == Backend::Rlwe) out.data.push_back(a.data[i]);
            i++;
        } else {
            out.monomials.push_back(b.monomials[j]);
            if (out.backend == Backend::Rlwe) out.data.push_back(b.data[j]);
            j++;
        }
    }
    if (out.backend == Backend::Transparent) {
        out.plain.resize(a.plain_len);
        for (size_t s = 0; s < a.plain_len; s++)
            out.plain[s] = algebra::ring_add(ctx.rp, a.plain[s], b.plain[s]);
    }
    check_budget(ctx, out);
    return out;
}

inline MultiKeyCiphertext eval_neg(const MkheContext& ctx, const MultiKeyCiphertext& x) {
    MultiKeyCiphertext out = x;
    if (out.backend == Backend::Rlwe) {
        for (auto& slots : out.data)
            for (auto& p : slots) p = rns_neg(ctx.rns, p);
    } else {
        for (auto& m : out.plain) m = algebra::ring_neg(ctx.rp, m);
    }
    return out;
}

inline MultiKeyCiphertext eval_sub(const MkheContext& ctx, const MultiKeyCiphertext& x,
                                   const MultiKeyCiphertext& y) {
    return eval_add(ctx, x, eval_neg(ctx, y));
}

/* Multiply every slot by a public field scalar (lifted as-is; plaintext
 * semantics are preserved modulo the field because t is a multiple of p). */
inline MultiKeyCiphertext eval_scalar_mul(const MkheContext& ctx, const MultiKeyCiphertext& x,
                                          uint64_t alpha) {
    alpha = ctx.fp.reduce(alpha);
    MultiKeyCiphertext out = x;
    out.noise_log2 += std::log2(double(alpha) + 1.0);
    if (out.backend == Backend::Rlwe) {
        std::vector<uint64_t> res = rns_lift(ctx.rns, alpha);
        for (auto& slots : out.data)
            for (auto& p : slots) p = rns_scalar_mul(ctx.rns, res, p);
    } else {
        for (auto& m : out.plain) m = algebra::ring_scalar_mul(ctx.rp, alpha % ctx.ap.t, m);
    }
    check_budget(ctx, out);
    return out;
}

struct MatrixEntry {
    uint32_t row = 0, col = 0;
    uint64_t val = 0;
};

/* Public sparse matrix over the field applied to the slot vector:
 * out[r] = sum over entries of val * in[c]. */
inline MultiKeyCiphertext eval_matrix_mul(const MkheContext& ctx, size_t rows, size_t cols,
                                          const std::vector<MatrixEntry>& entries,
                                          const MultiKeyCiphertext& x) {
    if (x.plain_len != cols) throw ParamMismatch("matrix width does not match slot count");
    MultiKeyCiphertext out;
    out.backend = x.backend;
    out.params_digest = ctx.params_digest;
    out.key_set = x.key_set;
    out.level = x.level;
    out.plain_len = rows;
    out.monomials = x.monomials;
    std::vector<size_t> row_weight(rows, 0);
    for (const auto& e : entries) {
        if (e.row >= rows || e.col >= cols) throw ParamMismatch("matrix entry out of range");
        row_weight[e.row]++;
    }
    size_t w = rows ? *std::max_element(row_weight.begin(), row_weight.end()) : 0;
    out.noise_log2 =
        x.noise_log2 + std::log2(double(ctx.ap.p)) + std::log2(double(w) + 1.0);
    if (out.backend == Backend::Rlwe) {
        out.data.assign(x.monomials.size(), std::vector<RnsPoly>(rows, rns_zero(ctx.rns)));
        for (const auto& e : entries) {
            std::vector<uint64_t> res = rns_lift(ctx.rns, ctx.fp.reduce(e.val));
            for (size_t m = 0; m < x.monomials.size(); m++)
                rns_fma_in(ctx.rns, out.data[m][e.row], res, x.data[m][e.col]);
        }
    } else {
        out.plain.assign(rows, algebra::ring_zero(ctx.rp));
        for (const auto& e : entries)
            out.plain[e.row] = algebra::ring_add(
                ctx.rp, out.plain[e.row],
                algebra::ring_scalar_mul(ctx.rp, ctx.fp.reduce(e.val) % ctx.ap.t,
                                         x.plain[e.col]));
    }
    check_budget(ctx, out);
    return out;
}

/* Public dense matrix over the plaintext ring (row-major), used to evaluate
 * commitment maps under encryption. */
inline MultiKeyCiphertext eval_ring_matrix_mul(const MkheContext& ctx, size_t rows, size_t cols,
                                               const std::vector<RingElement>& M,
                                               const MultiKeyCiphertext& x) {
    if (M.size() != rows * cols) throw ParamMismatch("matrix dimension");
    if (x.plain_len != cols) throw ParamMismatch("matrix width does not match slot count");
    MultiKeyCiphertext out;
    out.backend = x.backend;
    out.params_digest = ctx.params_digest;
    out.key_set = x.key_set;
    out.level = x.level;
    out.plain_len = rows;
    out.monomials = x.monomials;
    out.noise_log2 = x.noise_log2 + std::log2(double(ctx.ap.t)) +
                     std::log2(double(ctx.ap.n)) + std::log2(double(cols) + 1.0);
    if (out.backend == Backend::Rlwe) {
        std::vector<RnsPoly> lifted(rows * cols);
        for (size_t i = 0; i < M.size(); i++) lifted[i] = rns_from_ring(ctx.rns, M[i]);
        out.data.assign(x.monomials.size(), std::vector<RnsPoly>(rows, rns_zero(ctx.rns)));
        for (size_t m = 0; m < x.monomials.size(); m++)
            for (size_t r = 0; r < rows; r++)
                for (size_t c = 0; c < cols; c++)
                    rns_mul_acc(ctx.rns, out.data[m][r], lifted[r * cols + c], x.data[m][c]);
    } else {
        out.plain.assign(rows, algebra::ring_zero(ctx.rp));
        for (size_t r = 0; r < rows; r++)
            for (size_t c = 0; c < cols; c++)
                out.plain[r] = algebra::ring_add(
                    ctx.rp, out.plain[r], algebra::ring_mul(ctx.rp, M[r * cols + c], x.plain[c]));
    }
    check_budget(ctx, out);
    return out;
}

/* Slot-wise ciphertext product via the tensor of the two payloads — no
 * relinearization, so the result carries quadratic monomials and no further
 * multiplications are possible. A one-slot operand broadcasts. */
inline MultiKeyCiphertext eval_ct_mul(const MkheContext& ctx, const MultiKeyCiphertext& x,
                                      const MultiKeyCiphertext& y) {
    check_compat(ctx, x, y);
    if (x.level != 0 || y.level != 0)
        throw DepthExceeded("ciphertext product requires degree-one inputs");
    size_t out_len;
    if (x.plain_len == y.plain_len)
        out_len = x.plain_len;
    else if (x.plain_len == 1 || y.plain_len == 1)
        out_len = std::max(x.plain_len, y.plain_len);
    else
        throw ParamMismatch("ciphertext slot counts differ");
    std::vector<uint64_t> ks = union_keys(x.key_set, y.key_set);
    MultiKeyCiphertext a = align_to(ctx, x, ks);
    MultiKeyCiphertext b = align_to(ctx, y, ks);
    MultiKeyCiphertext out;
    out.backend = a.backend;
    out.params_digest = ctx.params_digest;
    out.key_set = ks;
    out.level = 1;
    out.plain_len = out_len;
    out.noise_log2 = a.noise_log2 + b.noise_log2 + std::log2(double(ctx.ap.n));
    std::map<std::pair<uint32_t, uint32_t>, size_t> mono_idx;
    for (size_t i = 0; i < a.monomials.size(); i++) {
        if (a.monomials[i].first != 0) throw DepthExceeded("unexpected quadratic monomial");
        for (size_t j = 0; j < b.monomials.size(); j++) {
            if (b.monomials[j].first != 0) throw DepthExceeded("unexpected quadratic monomial");
            uint32_t u = a.monomials[i].second, v = b.monomials[j].second;
            auto key = std::minmax(u, v);
            mono_idx.emplace(std::pair<uint32_t, uint32_t>(key.first, key.second), 0);
        }
    }
    size_t idx = 0;
    for (auto& [k, v] : mono_idx) {
        out.monomials.push_back(k);
        v = idx++;
    }
    if (out.backend == Backend::Rlwe) {
        out.data.assign(out.monomials.size(), std::vector<RnsPoly>(out_len, rns_zero(ctx.rns)));
        for (size_t s = 0; s < out_len; s++) {
            size_t sa = a.plain_len == 1 ? 0 : s;
            size_t sb = b.plain_len == 1 ? 0 : s;
            for (size_t i = 0; i < a.monomials.size(); i++)
                for (size_t j = 0; j < b.monomials.size(); j++) {
                    uint32_t u = a.monomials[i].second, v = b.monomials[j].second;
                    auto key = std::minmax(u, v);
                    size_t m = mono_idx[{key.first, key.second}];
                    rns_mul_acc(ctx.rns, out.data[m][s], a.data[i][sa], b.data[j][sb]);
                }
        }
    } else {
        out.plain.resize(out_len);
        for (size_t s = 0; s < out_len; s++) {
            size_t sa = a.plain_len == 1 ? 0 : s;
            size_t sb = b.plain_len == 1 ? 0 : s;
            out.plain[s] = algebra::ring_mul(ctx.rp, a.plain[sa], b.plain[sb]);
        }
    }
    check_budget(ctx, out);
    return out;
}

/* Slot concatenation of degree-one ciphertexts (a convenience for building
 * the wired Z vector). */
inline MultiKeyCiphertext eval_concat(const MkheContext& ctx,
                                      const std::vector<const MultiKeyCiphertext*>& parts) {
    if (parts.empty()) throw ParamMismatch("empty concatenation");
    MultiKeyCiphertext out = *parts[0];
    for (size_t i = 1; i < parts.size(); i++) {
        const MultiKeyCiphertext& nxt = *parts[i];
        check_compat(ctx, out, nxt);
        if (out.level != 0 || nxt.level != 0)
            throw DepthExceeded("concatenation requires degree-one inputs");
        std::vector<uint64_t> ks = union_keys(out.key_set, nxt.key_set);
        MultiKeyCiphertext a = align_to(ctx, out, ks);
        MultiKeyCiphertext b = align_to(ctx, nxt, ks);
        MultiKeyCiphertext merged;
        merged.backend = a.backend;
        merged.params_digest = ctx.params_digest;
        merged.key_set = ks;
        merged.level = 0;
        merged.plain_len = a.plain_len + b.plain_len;
        merged.noise_log2 = std::max(a.noise_log2, b.noise_log2);
        std::set<std::pair<uint32_t, uint32_t>> monos(a.monomials.begin(), a.monomials.end());
        monos.insert(b.monomials.begin(), b.monomials.end());
        merged.monomials.assign(monos.begin(), monos.end());
        if (merged.backend == Backend::Rlwe) {
            merged.data.assign(merged.monomials.size(),
                               std::vector<RnsPoly>(merged.plain_len, rns_zero(ctx.rns)));
            for (size_t m = 0; m < merged.monomials.size(); m++) {
                ptrdiff_t ma = a.find_mono(merged.monomials[m].first, merged.monomials[m].second);
                ptrdiff_t mb = b.find_mono(merged.monomials[m].first, merged.monomials[m].second);
                for (size_t s = 0; s < a.plain_len; s++)
                    if (ma >= 0) merged.data[m][s] = a.data[ma][s];
                for (size_t s = 0; s < b.plain_len; s++)
                    if (mb >= 0) merged.data[m][a.plain_len + s] = b.data[mb][s];
            }
        } else {
            merged.plain = a.plain;
            merged.plain.insert(merged.plain.end(), b.plain.begin(), b.plain.end());
        }
        out = std::move(merged);
    }
    return out;
}

/* ---- Two-round threshold decryption ----
 *
 * A degree-two payload sum_{a<=b} Q[(a,b)] s_a s_b cannot be split into
 * single-party shares in one round: the quadratic monomials mix two secrets.
 * Round one has the lower-indexed party of each mixed monomial publish a
 * masked collapse g_{a->b} = Q[(a,b)] s_a + t e, turning the monomial into
 * something linear in s_b. Round two has each party b fold its collapses,
 * its linear term, and its own square term into one flooded share. Summing
 * all shares plus Q[(0,0)] yields the payload modulo q up to t * noise. */

struct CollapseBundle {
    uint64_t party_id = 0;
    Digest ct_digest{};
    struct Entry {
        uint32_t a = 0, b = 0;
        std::vector<RnsPoly> data; // per slot; empty for transparent
    };
    std::vector<Entry> entries;

    Bytes serialize() const {
        Bytes out;
        put_u32(out, kEncodingVersion);
        put_u64(out, party_id);
        put_digest(out, ct_digest);
        put_u64(out, entries.size());
        for (const auto& e : entries) {
            put_u32(out, e.a);
            put_u32(out, e.b);
            put_u64(out, e.data.size());
            for (const auto& p : e.data) put_u64_vec(out, p);
        }
        return out;
    }
};

struct DecryptionShare {
    uint64_t party_id = 0;
    Digest ct_digest{};
    std::vector<RnsPoly> data; // per slot; empty for transparent

    Bytes serialize() const {
        Bytes out;
        put_u32(out, kEncodingVersion);
        put_u64(out, party_id);
        put_digest(out, ct_digest);
        put_u64(out, data.size());
        for (const auto& p : data) put_u64_vec(out, p);
        return out;
    }
};

inline uint32_t party_position(const MultiKeyCiphertext& ct, uint64_t party_id) {
    auto it = std::lower_bound(ct.key_set.begin(), ct.key_set.end(), party_id);
    if (it == ct.key_set.end() || *it != party_id)
        throw NotAParticipant("party is not in the ciphertext key set");
    return uint32_t(it - ct.key_set.begin()) + 1;
}

/* Round one: collapse every mixed monomial whose lower position is ours. */
inline CollapseBundle decrypt_round1(const MkheContext& ctx, const MkheKeyPair& kp,
                                     const MultiKeyCiphertext& ct) {
    if (ct.level > 1) throw DepthExceeded("ciphertext degree exceeds ceremony support");
    CollapseBundle out;
    out.party_id = kp.party_id;
    out.ct_digest = ct_digest(ct);
    uint32_t mypos = party_position(ct, kp.party_id);
    RandomStream noise(kp.sk_seed, "mkhe-round1/" + digest_hex(out.ct_digest));
    for (size_t m = 0; m < ct.monomials.size(); m++) {
        auto [a, b] = ct.monomials[m];
        if (a != mypos || b <= a) continue;
        CollapseBundle::Entry e;
        e.a = a;
        e.b = b;
        if (ct.backend == Backend::Rlwe) {
            e.data.resize(ct.plain_len);
            for (size_t s = 0; s < ct.plain_len; s++) {
                RnsPoly g = rns_mul(ctx.rns, ct.data[m][s], kp.s);
                rns_add_in(ctx.rns, g, rns_scaled_err(ctx.rns, noise));
                e.data[s] = std::move(g);
            }
        }
        out.entries.push_back(std::move(e));
    }
    return out;
}

/* Round two: one flooded share per party. Collapse bundles are matched by
 * party and bound to the exact ciphertext digest. */
inline DecryptionShare partial_decrypt(const MkheContext& ctx, const MkheKeyPair& kp,
                                       const MultiKeyCiphertext& ct,
                                       const std::vector<CollapseBundle>& bundles) {
    if (ct.level > 1) throw DepthExceeded("ciphertext degree exceeds ceremony support");
    DecryptionShare out;
    out.party_id = kp.party_id;
    out.ct_digest = ct_digest(ct);
    double effective = log2_add(ct.noise_log2, std::log2(double(ct.key_set.size()) + 1.0) +
                                                   kSmudgeBits + std::log2(double(ctx.ap.t)));
    if (effective >= ctx.budget_log2)
        throw NoiseBudgetExceeded("flooded shares would exceed q/2");
    uint32_t mypos = party_position(ct, kp.party_id);

    std::map<uint64_t, const CollapseBundle*> by_party;
    for (const auto& bu : bundles) {
        if (bu.ct_digest != out.ct_digest)
            throw ShareBindingError("collapse bundle bound to a different ciphertext");
        by_party.emplace(bu.party_id, &bu); // first bundle per party wins
    }

    // Gather the collapses addressed to us: monomials (a, mypos), a < mypos.
    std::vector<const CollapseBundle::Entry*> incoming;
    for (size_t m = 0; m < ct.monomials.size(); m++) {
        auto [a, b] = ct.monomials[m];
        if (b != mypos || a == 0 || a >= b) continue;
        uint64_t sender = ct.key_set[a - 1];
        auto it = by_party.find(sender);
        const CollapseBundle::Entry* found = nullptr;
        if (it != by_party.end())
            for (const auto& e : it->second->entries)
                if (e.a == a && e.b == b) found = &e;
        if (!found) throw IncompleteShares("missing collapse for a mixed monomial");
        incoming.push_back(found);
    }

    if (ct.backend == Backend::Transparent) return out;

    RandomStream noise(kp.sk_seed, "mkhe-round2/" + digest_hex(out.ct_digest));
    RnsPoly s2 = rns_mul(ctx.rns, kp.s, kp.s);
    ptrdiff_t lin = ct.find_mono(0, mypos);
    ptrdiff_t sq = ct.find_mono(mypos, mypos);
    out.data.resize(ct.plain_len);
    for (size_t s = 0; s < ct.plain_len; s++) {
        RnsPoly acc = lin >= 0 ? ct.data[lin][s] : rns_zero(ctx.rns);
        for (const auto* e : incoming) rns_add_in(ctx.rns, acc, e->data[s]);
        acc = rns_mul(ctx.rns, acc, kp.s);
        if (sq >= 0) rns_add_in(ctx.rns, acc, rns_mul(ctx.rns, ct.data[sq][s], s2));
        rns_add_in(ctx.rns, acc,
                   rns_scalar_mul(ctx.rns, ctx.rns.t_res, rns_sample_smudge(ctx.rns, noise)));
        out.data[s] = std::move(acc);
    }
    return out;
}

/* Combine: constant term plus every party's share, decoded per slot. */
inline std::vector<RingElement> combine(const MkheContext& ctx, const MultiKeyCiphertext& ct,
                                        const std::vector<DecryptionShare>& shares) {
    Digest want = ct_digest(ct);
    std::map<uint64_t, const DecryptionShare*> by_party;
    for (const auto& sh : shares) {
        if (sh.ct_digest != want)
            throw ShareBindingError("share bound to a different ciphertext");
        if (!std::binary_search(ct.key_set.begin(), ct.key_set.end(), sh.party_id))
            throw NotAParticipant("share from a party outside the key set");
        by_party.emplace(sh.party_id, &sh);
    }
    for (uint64_t id : ct.key_set)
        if (!by_party.count(id)) throw IncompleteShares("missing decryption share");

    if (ct.backend == Backend::Transparent) return ct.plain;

    ptrdiff_t c00 = ct.find_mono(0, 0);
    std::vector<RingElement> out(ct.plain_len);
    for (size_t s = 0; s < ct.plain_len; s++) {
        RnsPoly acc = c00 >= 0 ? ct.data[c00][s] : rns_zero(ctx.rns);
        for (uint64_t id : ct.key_set) rns_add_in(ctx.rns, acc, by_party[id]->data[s]);
        out[s] = rns_to_ring(ctx.rns, acc);
    }
    return out;
}

/* Interpret decoded slots as field elements: the constant coefficient mod p,
 * with every higher coefficient required to vanish. */
inline FieldVec slots_to_fields(const MkheContext& ctx, const std::vector<RingElement>& slots) {
    FieldVec out(slots.size());
    for (size_t i = 0; i < slots.size(); i++) {
        for (size_t c = 1; c < slots[i].size(); c++)
            if (slots[i][c] != 0) throw IntegrityError("non-constant plaintext slot");
        out[i] = ctx.fp.reduce(slots[i][0]);
    }
    return out;
}

} // namespace zkadmit::mkhe
