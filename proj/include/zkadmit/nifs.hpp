#pragma once

#include "relation.hpp"

namespace zkadmit::nifs {

using namespace zkadmit::relation;

inline constexpr const char* kFoldProtocolId = "zk-ams/fold";

/* Verification key for the folding verifier: binds the relation shape and
 * every commitment parameter set in play. */
inline Digest fold_vk_digest(const R1CSShape& shape, const CommitParamSet& pp) {
    Bytes b;
    put_digest(b, shape.digest());
    put_digest(b, pp.E.params_digest);
    put_digest(b, pp.W.params_digest);
    put_digest(b, pp.T.params_digest);
    return hash_tagged("nifs-vk", b);
}

/* Transcript context: every fold challenge is bound to the protocol, chain,
 * batch, and a digest over (vk, all public inputs of the batch). */
struct FoldContext {
    uint64_t chain_id = 0;
    uint64_t batch_id = 0;
    Digest binding{}; // digest of (vk, X)

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_str(b, kFoldProtocolId);
        put_u64(b, chain_id);
        put_u64(b, batch_id);
        put_digest(b, binding);
        return b;
    }
};

inline Digest fold_binding_digest(const Digest& vk, const Digest& inputs_digest) {
    Bytes b;
    put_digest(b, vk);
    put_digest(b, inputs_digest);
    return hash_tagged("nifs-binding", b);
}

inline FoldContext make_fold_context(uint64_t chain_id, uint64_t batch_id, const Digest& vk,
                                     const Digest& inputs_digest) {
    FoldContext ctx;
    ctx.chain_id = chain_id;
    ctx.batch_id = batch_id;
    ctx.binding = fold_binding_digest(vk, inputs_digest);
    return ctx;
}

/* T = (A·Z1)∘(B·Z2) + (A·Z2)∘(B·Z1) − u1·(C·Z2) − u2·(C·Z1), the bilinear
 * residue that makes the relaxed relation close under random linear
 * combination. */
inline FieldVec compute_cross_term(const Field& f, const R1CSShape& shape, const FieldVec& x1,
                                   uint64_t u1, const FieldVec& W1, const FieldVec& x2,
                                   uint64_t u2, const FieldVec& W2) {
    FieldVec z1 = build_z(shape, W1, x1, u1);
    FieldVec z2 = build_z(shape, W2, x2, u2);
    FieldVec az1 = shape.A.mat_vec(f, z1);
    FieldVec bz1 = shape.B.mat_vec(f, z1);
    FieldVec cz1 = shape.C.mat_vec(f, z1);
    FieldVec az2 = shape.A.mat_vec(f, z2);
    FieldVec bz2 = shape.B.mat_vec(f, z2);
    FieldVec cz2 = shape.C.mat_vec(f, z2);
    FieldVec t(shape.m_c);
    for (size_t i = 0; i < shape.m_c; i++) {
        uint64_t v = f.add(f.mul(az1[i], bz2[i]), f.mul(az2[i], bz1[i]));
        v = f.sub(v, f.mul(u1, cz2[i]));
        v = f.sub(v, f.mul(u2, cz1[i]));
        t[i] = v;
    }
    return t;
}

/* Committed cross term with its commitment randomness. */
struct CrossTerm {
    FieldVec T;
    FieldVec r_T;
    Commitment T_bar;
};

inline CrossTerm commit_cross_term(const Field& f, const R1CSShape& shape,
                                   const CommitParamSet& pp, const CommittedRelaxedInstance& i1,
                                   const CommittedRelaxedWitness& w1,
                                   const CommittedRelaxedInstance& i2,
                                   const CommittedRelaxedWitness& w2, const FieldVec& r_T) {
    CrossTerm ct;
    ct.T = compute_cross_term(f, shape, i1.x, i1.u, w1.W, i2.x, i2.u, w2.W);
    ct.r_T = r_T;
    ct.T_bar = commit::commit_fields(pp.T, ct.T, ct.r_T);
    return ct;
}

/* Fiat–Shamir fold challenge: hashes the context, both instances'
 * commitments, the cross-term commitment, and the step counter. */
inline uint64_t derive_challenge(const Field& f, const FoldContext& ctx, const Commitment& E_acc,
                                 const Commitment& W_acc, const Commitment& E_i,
                                 const Commitment& W_i, const Commitment& T_bar, uint64_t step) {
    Bytes b = ctx.serialize();
    put_commitment(b, E_acc);
    put_commitment(b, W_acc);
    put_commitment(b, E_i);
    put_commitment(b, W_i);
    put_commitment(b, T_bar);
    put_u64(b, step);
    return f.from_digest(hash_tagged("nifs-challenge", b));
}

/* Deterministic instance-side fold: anyone holding the two instances and
 * T̄ can derive the folded instance without witnesses. */
inline CommittedRelaxedInstance fold_instances(const Field& f, const algebra::RingParams& rp,
                                               const CommittedRelaxedInstance& acc,
                                               const CommittedRelaxedInstance& inst,
                                               const Commitment& T_bar, uint64_t v) {
    if (acc.x.size() != inst.x.size()) throw ParamMismatch("public input lengths differ");
    CommittedRelaxedInstance out;
    out.x = vec_fma(f, acc.x, v, inst.x);
    out.u = f.add(acc.u, f.mul(v, inst.u));
    Commitment e1 = commit::fold_commitments(rp, f, acc.E_bar, T_bar, v, 1);
    out.E_bar = commit::fold_commitments(rp, f, e1, inst.E_bar, v, 2);
    out.W_bar = commit::fold_commitments(rp, f, acc.W_bar, inst.W_bar, v, 1);
    return out;
}

inline CommittedRelaxedWitness fold_witnesses(const Field& f, const CommittedRelaxedWitness& acc,
                                              const CommittedRelaxedWitness& wit,
                                              const CrossTerm& ct, uint64_t v) {
    uint64_t v2 = f.mul(v, v);
    CommittedRelaxedWitness out;
    out.W = vec_fma(f, acc.W, v, wit.W);
    out.r_W = vec_fma(f, acc.r_W, v, wit.r_W);
    out.E = vec_fma(f, vec_fma(f, acc.E, v, ct.T), v2, wit.E);
    out.r_E = vec_fma(f, vec_fma(f, acc.r_E, v, ct.r_T), v2, wit.r_E);
    return out;
}

struct FoldResult {
    CommittedRelaxedInstance instance;
    CommittedRelaxedWitness witness;
    Commitment T_bar;
    uint64_t challenge = 0;
};

/* Plaintext reference fold: checks both inputs, commits the cross term with
 * the supplied randomness, derives the challenge, and folds. */
inline FoldResult fold_plain(const Field& f, const algebra::RingParams& rp,
                             const R1CSShape& shape, const CommitParamSet& pp,
                             const FoldContext& ctx, const CommittedRelaxedInstance& acc_i,
                             const CommittedRelaxedWitness& acc_w,
                             const CommittedRelaxedInstance& inst,
                             const CommittedRelaxedWitness& wit, const FieldVec& r_T,
                             uint64_t step) {
    C1Failure why;
    if (!check_c1(f, shape, acc_i, acc_w, pp, &why))
        throw NotSatisfied("accumulator fails committed-relaxed check");
    if (!check_c1(f, shape, inst, wit, pp, &why))
        throw NotSatisfied("incoming instance fails committed-relaxed check");
    if (r_T.size() != pp.T.l) throw ParamMismatch("cross-term randomness length");
    FoldResult out;
    CrossTerm ct = commit_cross_term(f, shape, pp, acc_i, acc_w, inst, wit, r_T);
    out.T_bar = ct.T_bar;
    out.challenge = derive_challenge(f, ctx, acc_i.E_bar, acc_i.W_bar, inst.E_bar, inst.W_bar,
                                     ct.T_bar, step);
    out.instance = fold_instances(f, rp, acc_i, inst, ct.T_bar, out.challenge);
    out.witness = fold_witnesses(f, acc_w, wit, ct, out.challenge);
    return out;
}

inline FoldResult fold_plain(const Field& f, const algebra::RingParams& rp,
                             const R1CSShape& shape, const CommitParamSet& pp,
                             const FoldContext& ctx, const CommittedRelaxedInstance& acc_i,
                             const CommittedRelaxedWitness& acc_w,
                             const CommittedRelaxedInstance& inst,
                             const CommittedRelaxedWitness& wit, RandomStream& rng,
                             uint64_t step) {
    FieldVec r_T(pp.T.l);
    for (auto& r : r_T) r = f.sample(rng);
    return fold_plain(f, rp, shape, pp, ctx, acc_i, acc_w, inst, wit, r_T, step);
}

/* One folding-transcript step as seen by a verifier. */
struct FoldStepRecord {
    Commitment E_acc;
    Commitment W_acc;
    Commitment E_i;
    Commitment W_i;
    Commitment T_bar;
    uint64_t challenge = 0;
    uint64_t step = 0;
    FieldVec x_i;
    uint64_t u_i = 0;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_commitment(b, E_acc);
        put_commitment(b, W_acc);
        put_commitment(b, E_i);
        put_commitment(b, W_i);
        put_commitment(b, T_bar);
        put_u64(b, challenge);
        put_u64(b, step);
        put_u64_vec(b, x_i);
        put_u64(b, u_i);
        return b;
    }
};

/* Deterministic verifier: replays the transcript from the initial
 * accumulator instance. For each step it recomputes the challenge and the
 * folded instance; the claimed final instance must match exactly. */
inline bool nifs_verify(const Field& f, const algebra::RingParams& rp, const FoldContext& ctx,
                        CommittedRelaxedInstance acc, const std::vector<FoldStepRecord>& steps,
                        const CommittedRelaxedInstance& claimed) {
    for (const auto& s : steps) {
        if (s.E_acc != acc.E_bar || s.W_acc != acc.W_bar) return false;
        uint64_t v = derive_challenge(f, ctx, s.E_acc, s.W_acc, s.E_i, s.W_i, s.T_bar, s.step);
        if (v != s.challenge) return false;
        CommittedRelaxedInstance inst;
        inst.E_bar = s.E_i;
        inst.W_bar = s.W_i;
        inst.x = s.x_i;
        inst.u = s.u_i;
        acc = fold_instances(f, rp, acc, inst, s.T_bar, v);
    }
    return acc == claimed;
}

} // namespace zkadmit::nifs
