#pragma once

#include "r1cs.hpp"

namespace zkadmit::relation {

/* ---- host-side toy primitives -------------------------------------------
 * An algebraic sponge hash (cube permutation, 64 rounds) and a Schnorr-style
 * signature over the order-65537 subgroup of F_p^*. Both exist to keep the
 * admission relation's hash/signature checks real while staying arithmetizable
 * in a few hundred constraints. They are NOT production-secure primitives:
 * the exponent group has 17-bit order, challenges are 16 bits, and the
 * in-circuit bit decomposition is not range-checked against p. */

inline constexpr int kHashRounds = 64;

inline const std::vector<uint64_t>& hash_round_constants(const Field& f) {
    static thread_local uint64_t cached_p = 0;
    static thread_local std::vector<uint64_t> cached;
    if (cached_p != f.p) {
        cached.resize(kHashRounds);
        for (int i = 0; i < kHashRounds; i++) {
            Bytes b;
            put_u64(b, uint64_t(i));
            cached[i] = f.from_digest(hash_tagged("algebraic-hash-rc", b));
        }
        cached_p = f.p;
    }
    return cached;
}

/* x <- (x + k + c_i)^3, 64 rounds. */
inline uint64_t hash_permute(const Field& f, uint64_t x, uint64_t k) {
    const auto& rc = hash_round_constants(f);
    for (int i = 0; i < kHashRounds; i++) {
        uint64_t t = f.add(f.add(x, k), rc[i]);
        x = f.mul(f.mul(t, t), t);
    }
    return x;
}

/* Rate-1 sponge with feed-forward: s <- P(s + m) + s + m. */
inline uint64_t field_hash(const Field& f, const std::vector<uint64_t>& msg) {
    uint64_t s = 0;
    for (uint64_t m : msg) {
        uint64_t in = f.add(s, m);
        s = f.add(hash_permute(f, in, 0), in);
    }
    return s;
}

inline constexpr int kChallengeBits = 16;
inline constexpr int kScalarBits = 17; // covers [0, 65537)

inline uint64_t challenge_from_hash(uint64_t h) {
    return h & ((1ULL << kChallengeBits) - 1);
}

struct ToySignature {
    uint64_t R = 0; // commitment g^k
    uint64_t s = 0; // response, mod 65537
    bool operator==(const ToySignature&) const = default;
};

struct ToyKeyPair {
    uint64_t sk = 0; // exponent mod 65537
    uint64_t pk = 0; // g^sk in F_p
};

inline ToyKeyPair toy_keygen(const Field& f, RandomStream& rng) {
    ToyKeyPair kp;
    kp.sk = 1 + rng.uniform(algebra::kSubgroupOrder - 1);
    kp.pk = f.pow(algebra::kSubgroupGen, kp.sk);
    return kp;
}

inline ToySignature toy_sign(const Field& f, uint64_t sk, uint64_t msg, RandomStream& rng) {
    ToySignature sig;
    uint64_t k = rng.uniform(algebra::kSubgroupOrder);
    sig.R = f.pow(algebra::kSubgroupGen, k);
    uint64_t e = challenge_from_hash(field_hash(f, {sig.R, msg}));
    sig.s = (k + e * sk) % algebra::kSubgroupOrder;
    return sig;
}

inline bool toy_verify(const Field& f, uint64_t pk, uint64_t msg, const ToySignature& sig) {
    uint64_t e = challenge_from_hash(field_hash(f, {sig.R, msg}));
    return f.pow(algebra::kSubgroupGen, sig.s) == f.mul(sig.R, f.pow(pk, e));
}

/* ---- constraint builder -------------------------------------------------
 * Emits one R1CS row per enforce() call and tracks a full assignment as it
 * goes. The emitted shape is a function of the gadget sequence only (no
 * value-dependent branching), so every honest client derives the identical
 * matrices — a folding prerequisite. */

struct Var {
    uint32_t id = UINT32_MAX;
};

struct Term {
    Var v;
    uint64_t coeff;
};

struct LinComb {
    std::vector<Term> terms;
    uint64_t constant = 0;
};

class CircuitBuilder {
public:
    explicit CircuitBuilder(const Field& f) : f_(f) {}

    const Field& field() const { return f_; }

    Var add_witness(uint64_t value) {
        vars_.push_back({Kind::Witness, uint32_t(w_.size())});
        w_.push_back(f_.reduce(value));
        return Var{uint32_t(vars_.size() - 1)};
    }

    Var add_public(uint64_t value) {
        vars_.push_back({Kind::Public, uint32_t(x_.size())});
        x_.push_back(f_.reduce(value));
        return Var{uint32_t(vars_.size() - 1)};
    }

    uint64_t value(Var v) const {
        const VarInfo& vi = vars_.at(v.id);
        return vi.kind == Kind::Witness ? w_[vi.slot] : x_[vi.slot];
    }

    uint64_t value(const LinComb& lc) const {
        uint64_t acc = lc.constant;
        for (const Term& t : lc.terms) acc = f_.add(acc, f_.mul(t.coeff, value(t.v)));
        return acc;
    }

    LinComb lc(Var v, uint64_t coeff = 1) const { return LinComb{{{v, f_.reduce(coeff)}}, 0}; }
    LinComb constant(uint64_t c) const { return LinComb{{}, f_.reduce(c)}; }

    LinComb add(const LinComb& a, const LinComb& b) const {
        LinComb r = a;
        r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
        r.constant = f_.add(a.constant, b.constant);
        return r;
    }
    LinComb scale(uint64_t s, const LinComb& a) const {
        LinComb r;
        r.constant = f_.mul(s, a.constant);
        r.terms.reserve(a.terms.size());
        for (const Term& t : a.terms) r.terms.push_back({t.v, f_.mul(s, t.coeff)});
        return r;
    }
    LinComb sub(const LinComb& a, const LinComb& b) const {
        return add(a, scale(f_.p - 1, b));
    }

    /* a·b = c */
    void enforce(const LinComb& a, const LinComb& b, const LinComb& c) {
        rows_.push_back({a, b, c});
    }

    void assert_eq(const LinComb& a, const LinComb& b) { enforce(a, constant(1), b); }

    /* Product gadget: allocates the result as a fresh witness. */
    Var mul(const LinComb& a, const LinComb& b) {
        Var out = add_witness(f_.mul(value(a), value(b)));
        enforce(a, b, lc(out));
        return out;
    }

    /* Boolean witness: b(b-1) = 0. */
    Var add_bit(uint64_t bit) {
        Var b = add_witness(bit & 1);
        enforce(lc(b), sub(lc(b), constant(1)), constant(0));
        return b;
    }

    /* Little-endian bit split of x into nbits booleans plus recomposition.
     * Not range-checked against p: a toy-scheme caveat, fine for values the
     * honest prover derives (all < p). */
    std::vector<Var> decompose(const LinComb& x, int nbits) {
        uint64_t xv = value(x);
        std::vector<Var> bits;
        bits.reserve(nbits);
        LinComb sum = constant(0);
        uint64_t weight = 1;
        for (int i = 0; i < nbits; i++) {
            Var b = add_bit((xv >> i) & 1);
            sum = add(sum, lc(b, weight));
            weight = f_.mul(weight, 2);
            bits.push_back(b);
        }
        assert_eq(sum, x);
        return bits;
    }

    /* Square-and-multiply with a variable base; bits little-endian. */
    LinComb pow_var(const LinComb& base, const std::vector<Var>& bits) {
        LinComb acc = constant(1);
        for (size_t i = bits.size(); i-- > 0;) {
            Var sq = mul(acc, acc);
            Var bp = mul(lc(bits[i]), base);
            // select: 1 + b·(base - 1) = 1 - b + b·base
            LinComb sel = add(sub(constant(1), lc(bits[i])), lc(bp));
            acc = lc(mul(lc(sq), sel));
        }
        return acc;
    }

    /* Square-and-multiply with a fixed public base (selection is linear). */
    LinComb pow_const(uint64_t base, const std::vector<Var>& bits) {
        LinComb acc = constant(1);
        for (size_t i = bits.size(); i-- > 0;) {
            Var sq = mul(acc, acc);
            LinComb sel = add(constant(1), lc(bits[i], f_.sub(base, 1)));
            acc = lc(mul(lc(sq), sel));
        }
        return acc;
    }

    /* In-circuit twin of hash_permute + sponge feed-forward. */
    LinComb hash_permute_gadget(const LinComb& input) {
        const auto& rc = hash_round_constants(f_);
        LinComb t = input;
        for (int i = 0; i < kHashRounds; i++) {
            LinComb u = add(t, constant(rc[i]));
            Var sq = mul(u, u);
            Var cube = mul(lc(sq), u);
            t = lc(cube);
        }
        return t;
    }

    LinComb hash_gadget(const std::vector<LinComb>& msg) {
        LinComb s = constant(0);
        for (const LinComb& m : msg) {
            LinComb in = add(s, m);
            s = add(hash_permute_gadget(in), in);
        }
        return s;
    }

    /* In-circuit twin of toy_verify: g^s = R · pk^e with
     * e = low 16 bits of hash(R ‖ msg). */
    void schnorr_verify_gadget(const LinComb& R, const LinComb& s, const LinComb& pk,
                               const LinComb& msg) {
        LinComb h = hash_gadget({R, msg});
        std::vector<Var> hbits = decompose(h, 64);
        std::vector<Var> ebits(hbits.begin(), hbits.begin() + kChallengeBits);
        LinComb pk_e = pow_var(pk, ebits);
        std::vector<Var> sbits = decompose(s, kScalarBits);
        LinComb g_s = pow_const(algebra::kSubgroupGen, sbits);
        enforce(R, pk_e, g_s);
    }

    size_t num_constraints() const { return rows_.size(); }

    R1CSShape shape() const {
        R1CSShape s;
        s.m_c = rows_.size();
        s.num_witness = w_.size();
        s.num_public = x_.size();
        SparseMatrix* mats[3] = {&s.A, &s.B, &s.C};
        for (SparseMatrix* m : mats) {
            m->rows = s.m_c;
            m->cols = s.l_z();
        }
        for (size_t r = 0; r < rows_.size(); r++) {
            const LinComb* lcs[3] = {&rows_[r].a, &rows_[r].b, &rows_[r].c};
            for (int mi = 0; mi < 3; mi++) emit_row(*mats[mi], uint32_t(r), *lcs[mi], s);
        }
        return s;
    }

    FieldVec witness_values() const { return w_; }
    FieldVec public_values() const { return x_; }

private:
    enum class Kind { Witness, Public };
    struct VarInfo {
        Kind kind;
        uint32_t slot;
    };
    struct Row {
        LinComb a, b, c;
    };

    uint32_t z_index(Var v, const R1CSShape& s) const {
        const VarInfo& vi = vars_.at(v.id);
        return vi.kind == Kind::Witness ? vi.slot : uint32_t(s.num_witness + vi.slot);
    }

    void emit_row(SparseMatrix& m, uint32_t row, const LinComb& lc, const R1CSShape& s) const {
        // coalesce per column so the shape is canonical
        std::vector<std::pair<uint32_t, uint64_t>> cols;
        for (const Term& t : lc.terms) cols.emplace_back(z_index(t.v, s), t.coeff);
        if (lc.constant != 0) cols.emplace_back(uint32_t(s.u_index()), lc.constant);
        std::sort(cols.begin(), cols.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (size_t i = 0; i < cols.size();) {
            uint64_t acc = 0;
            size_t j = i;
            while (j < cols.size() && cols[j].first == cols[i].first)
                acc = f_.add(acc, cols[j++].second);
            if (acc != 0) m.entries.push_back({row, cols[i].first, acc});
            i = j;
        }
    }

    Field f_;
    std::vector<VarInfo> vars_;
    FieldVec w_, x_;
    std::vector<Row> rows_;
};

} // namespace zkadmit::relation
