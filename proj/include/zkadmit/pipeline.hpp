#pragma once

#include "mkhe.hpp"
#include "nifs.hpp"
#include "store.hpp"

namespace zkadmit::pipeline {

using namespace zkadmit::relation;
using mkhe::MkheContext;
using mkhe::MkheKeyPair;
using mkhe::MkhePublicKey;
using mkhe::MultiKeyCiphertext;

/* Everything shared by all parties: algebra, the admission relation, the
 * commitment parameter sets, the folding verification key, and the
 * homomorphic evaluation context. */
struct ProtocolParams {
    algebra::AlgebraParams ap;
    RelationConfig rcfg;
    Field f;
    algebra::RingParams rp;
    R1CSShape shape;
    CommitParamSet pp;
    Digest vk{};
    MkheContext mk;
};

inline ProtocolParams make_protocol_params(const algebra::AlgebraParams& ap,
                                           const RelationConfig& rcfg, const Bytes& commit_seed) {
    ProtocolParams p;
    p.ap = ap;
    p.rcfg = rcfg;
    p.f = ap.field();
    p.rp = ap.ring();
    p.shape = build_phc_relation(p.f, rcfg);
    p.pp = make_commit_params(p.rp, commit_seed, p.shape);
    p.vk = nifs::fold_vk_digest(p.shape, p.pp);
    p.mk = mkhe::make_context(ap);
    return p;
}

/* One user's batch submission: the public committed instance plus the
 * witness material encrypted under the user's own key, including the
 * cross-term randomness reserved for the step that folds this user in. */
struct UserContribution {
    uint64_t user_id = 0;
    uint64_t pk_seed = 0; // registry key the admission will be bound to
    MkhePublicKey pub;
    CommittedRelaxedInstance instance;
    MultiKeyCiphertext ct_x, ct_u, ct_E, ct_rE, ct_W, ct_rW, ct_rT;

    uint64_t hash_phc() const { return instance.x.at(kXHashPhc); }
};

inline UserContribution make_contribution(const ProtocolParams& pp, const MkheKeyPair& kp,
                                          const ResCredential& cred, RandomStream& rng) {
    UserContribution c;
    c.user_id = kp.party_id;
    c.pk_seed = cred.pk_seed;
    c.pub = kp.pub;
    c.instance = cred.instance;
    c.ct_x = mkhe::encrypt_fields(pp.mk, kp.pub, cred.instance.x, rng);
    c.ct_u = mkhe::encrypt_fields(pp.mk, kp.pub, {cred.instance.u}, rng);
    c.ct_E = mkhe::encrypt_fields(pp.mk, kp.pub, cred.witness.E, rng);
    c.ct_rE = mkhe::encrypt_fields(pp.mk, kp.pub, cred.witness.r_E, rng);
    c.ct_W = mkhe::encrypt_fields(pp.mk, kp.pub, cred.witness.W, rng);
    c.ct_rW = mkhe::encrypt_fields(pp.mk, kp.pub, cred.witness.r_W, rng);
    FieldVec r_T(pp.pp.T.l);
    for (auto& r : r_T) r = pp.f.sample(rng);
    c.ct_rT = mkhe::encrypt_fields(pp.mk, kp.pub, r_T, rng);
    return c;
}

inline void check_contribution_shape(const ProtocolParams& pp, const UserContribution& c) {
    if (c.instance.x.size() != pp.shape.num_public)
        throw IncompleteContribution("public input length");
    auto expect = [&](const MultiKeyCiphertext& ct, size_t len, const char* what) {
        if (ct.plain_len != len) throw IncompleteContribution(std::string("slot count: ") + what);
        if (ct.key_set != std::vector<uint64_t>{c.user_id})
            throw IncompleteContribution(std::string("key set: ") + what);
        if (ct.level != 0) throw IncompleteContribution(std::string("degree: ") + what);
    };
    expect(c.ct_x, pp.shape.num_public, "public inputs");
    expect(c.ct_u, 1, "relaxation scalar");
    expect(c.ct_E, pp.shape.m_c, "error vector");
    expect(c.ct_rE, pp.pp.E.l, "error randomness");
    expect(c.ct_W, pp.shape.num_witness, "witness");
    expect(c.ct_rW, pp.pp.W.l, "witness randomness");
    expect(c.ct_rT, pp.pp.T.l, "cross-term randomness");
}

/* One admitted identity as the chain will record it: the credential hash
 * paired with the seed key it is being bound to, in fold order. */
struct AdmissionPair {
    uint64_t hash_phc = 0;
    uint64_t pk_seed = 0;
    bool operator==(const AdmissionPair&) const = default;
};

inline Digest admission_set_digest(const std::vector<AdmissionPair>& xs) {
    Bytes b;
    put_u64(b, xs.size());
    for (const auto& p : xs) {
        put_u64(b, p.hash_phc);
        put_u64(b, p.pk_seed);
    }
    return hash_tagged("admission-set", b);
}

inline std::vector<AdmissionPair> admission_set(
    const std::vector<UserContribution>& contributions) {
    std::vector<AdmissionPair> xs;
    for (const auto& c : contributions) xs.push_back({c.hash_phc(), c.pk_seed});
    return xs;
}

/* Batch-wide folding context: challenge derivation is bound to the chain,
 * the batch, the verification key, and the ordered admission set. */
struct BatchContext {
    uint64_t chain_id = 0;
    uint64_t batch_id = 0;
    nifs::FoldContext fctx;
    Digest x_digest{}; // digest of the ordered admission set alone
};

inline BatchContext make_batch_context(const ProtocolParams& pp, uint64_t chain_id,
                                       uint64_t batch_id,
                                       const std::vector<UserContribution>& contributions) {
    BatchContext bc;
    bc.chain_id = chain_id;
    bc.batch_id = batch_id;
    bc.x_digest = admission_set_digest(admission_set(contributions));
    bc.fctx = nifs::make_fold_context(chain_id, batch_id, pp.vk, bc.x_digest);
    return bc;
}

/* Encrypted accumulator: the running folded instance in public, the running
 * folded witness under the union of the folded users' keys. */
struct AccumulatorState {
    uint64_t batch_id = 0;
    uint64_t step = 0;
    std::vector<uint64_t> roster;
    CommittedRelaxedInstance inst;
    MultiKeyCiphertext x, u, E, rE, W, rW;
};

inline AccumulatorState init_accumulator(const ProtocolParams& pp, const BatchContext& bc,
                                         const UserContribution& c) {
    check_contribution_shape(pp, c);
    AccumulatorState acc;
    acc.batch_id = bc.batch_id;
    acc.step = 1; // one user folded in so far
    acc.roster = {c.user_id};
    acc.inst = c.instance;
    acc.x = c.ct_x;
    acc.u = c.ct_u;
    acc.E = c.ct_E;
    acc.rE = c.ct_rE;
    acc.W = c.ct_W;
    acc.rW = c.ct_rW;
    return acc;
}

/* Homomorphic cross term: both Z vectors are wired as (W, x, u) ciphertexts
 * and pushed through the relation matrices; the bilinear residue follows
 * from one tensor product per pairing. The plaintext cross term is never
 * formed anywhere. */
inline MultiKeyCiphertext encrypted_cross_term(const ProtocolParams& pp,
                                               const AccumulatorState& acc,
                                               const UserContribution& c) {
    const MkheContext& mk = pp.mk;
    MultiKeyCiphertext z1 = mkhe::eval_concat(mk, {&acc.W, &acc.x, &acc.u});
    MultiKeyCiphertext z2 = mkhe::eval_concat(mk, {&c.ct_W, &c.ct_x, &c.ct_u});
    auto entries = [](const SparseMatrix& m) {
        std::vector<mkhe::MatrixEntry> es;
        es.reserve(m.entries.size());
        for (const auto& e : m.entries) es.push_back({e.row, e.col, e.val});
        return es;
    };
    size_t rows = pp.shape.m_c, cols = pp.shape.l_z();
    std::vector<mkhe::MatrixEntry> ea = entries(pp.shape.A), eb = entries(pp.shape.B),
                                   ec = entries(pp.shape.C);
    MultiKeyCiphertext az1 = mkhe::eval_matrix_mul(mk, rows, cols, ea, z1);
    MultiKeyCiphertext bz1 = mkhe::eval_matrix_mul(mk, rows, cols, eb, z1);
    MultiKeyCiphertext cz1 = mkhe::eval_matrix_mul(mk, rows, cols, ec, z1);
    MultiKeyCiphertext az2 = mkhe::eval_matrix_mul(mk, rows, cols, ea, z2);
    MultiKeyCiphertext bz2 = mkhe::eval_matrix_mul(mk, rows, cols, eb, z2);
    MultiKeyCiphertext cz2 = mkhe::eval_matrix_mul(mk, rows, cols, ec, z2);
    MultiKeyCiphertext pos = mkhe::eval_add(mk, mkhe::eval_ct_mul(mk, az1, bz2),
                                            mkhe::eval_ct_mul(mk, az2, bz1));
    MultiKeyCiphertext neg = mkhe::eval_add(mk, mkhe::eval_ct_mul(mk, acc.u, cz2),
                                            mkhe::eval_ct_mul(mk, c.ct_u, cz1));
    return mkhe::eval_sub(mk, pos, neg);
}

/* Run the two-round ceremony for one ciphertext with the key holders that
 * appear in its key set. */
inline std::vector<algebra::RingElement> run_ceremony(const MkheContext& mk,
                                                      const MultiKeyCiphertext& ct,
                                                      const std::vector<MkheKeyPair>& kps) {
    std::vector<mkhe::CollapseBundle> bundles;
    for (const auto& kp : kps)
        if (std::binary_search(ct.key_set.begin(), ct.key_set.end(), kp.party_id))
            bundles.push_back(mkhe::decrypt_round1(mk, kp, ct));
    std::vector<mkhe::DecryptionShare> shares;
    for (const auto& kp : kps)
        if (std::binary_search(ct.key_set.begin(), ct.key_set.end(), kp.party_id))
            shares.push_back(mkhe::partial_decrypt(mk, kp, ct, bundles));
    return mkhe::combine(mk, ct, shares);
}

/* The committed cross term: evaluate the commitment map on the encrypted
 * cross term and its encrypted randomness, then open only the commitment
 * (hiding) through the ceremony. Returns both the ciphertext of the
 * commitment and the decrypted commitment itself. */
struct CommittedCrossTerm {
    MultiKeyCiphertext ct_T_bar;
    Commitment T_bar;
};

inline CommittedCrossTerm encrypted_commit_cross_term(const ProtocolParams& pp,
                                                      const MultiKeyCiphertext& ct_T,
                                                      const MultiKeyCiphertext& ct_rT,
                                                      const std::vector<MkheKeyPair>& kps) {
    const MkheContext& mk = pp.mk;
    const commit::CommitParams& cp = pp.pp.T;
    MultiKeyCiphertext gr = mkhe::eval_ring_matrix_mul(mk, cp.k, cp.l, cp.G, ct_rT);
    MultiKeyCiphertext hm = mkhe::eval_ring_matrix_mul(mk, cp.k, cp.m, cp.H, ct_T);
    CommittedCrossTerm out;
    out.ct_T_bar = mkhe::eval_add(mk, gr, hm);
    out.T_bar.label = cp.label;
    out.T_bar.params_digest = cp.params_digest;
    out.T_bar.value = run_ceremony(mk, out.ct_T_bar, kps);
    return out;
}

/* One encrypted fold step: cross term, committed cross term via ceremony,
 * public challenge, then the linear fold on both the public instance and
 * the encrypted witness state. */
inline nifs::FoldStepRecord fold_step_encrypted(const ProtocolParams& pp, const BatchContext& bc,
                                                AccumulatorState& acc, const UserContribution& c,
                                                const std::vector<MkheKeyPair>& kps) {
    check_contribution_shape(pp, c);
    const MkheContext& mk = pp.mk;
    MultiKeyCiphertext ct_T = encrypted_cross_term(pp, acc, c);
    Commitment T_bar = encrypted_commit_cross_term(pp, ct_T, c.ct_rT, kps).T_bar;

    uint64_t step_index = acc.step;
    uint64_t v = nifs::derive_challenge(pp.f, bc.fctx, acc.inst.E_bar, acc.inst.W_bar,
                                        c.instance.E_bar, c.instance.W_bar, T_bar, step_index);
    uint64_t v2 = pp.f.mul(v, v);

    nifs::FoldStepRecord rec;
    rec.E_acc = acc.inst.E_bar;
    rec.W_acc = acc.inst.W_bar;
    rec.E_i = c.instance.E_bar;
    rec.W_i = c.instance.W_bar;
    rec.T_bar = T_bar;
    rec.challenge = v;
    rec.step = step_index;
    rec.x_i = c.instance.x;
    rec.u_i = c.instance.u;

    acc.inst = nifs::fold_instances(pp.f, pp.rp, acc.inst, c.instance, T_bar, v);
    acc.x = mkhe::eval_add(mk, acc.x, mkhe::eval_scalar_mul(mk, c.ct_x, v));
    acc.u = mkhe::eval_add(mk, acc.u, mkhe::eval_scalar_mul(mk, c.ct_u, v));
    acc.W = mkhe::eval_add(mk, acc.W, mkhe::eval_scalar_mul(mk, c.ct_W, v));
    acc.rW = mkhe::eval_add(mk, acc.rW, mkhe::eval_scalar_mul(mk, c.ct_rW, v));
    acc.E = mkhe::eval_add(mk, mkhe::eval_add(mk, acc.E, mkhe::eval_scalar_mul(mk, ct_T, v)),
                           mkhe::eval_scalar_mul(mk, c.ct_E, v2));
    acc.rE = mkhe::eval_add(mk, mkhe::eval_add(mk, acc.rE, mkhe::eval_scalar_mul(mk, c.ct_rT, v)),
                            mkhe::eval_scalar_mul(mk, c.ct_rE, v2));
    acc.step++;
    acc.roster.push_back(c.user_id);
    return rec;
}

/* The public record of one batch fold. Each step record is individually
 * content-addressed; the transcript object lists them in order. */
struct FoldTranscript {
    nifs::FoldContext ctx;
    Digest x_digest{};
    CommittedRelaxedInstance init;
    std::vector<nifs::FoldStepRecord> steps;
    std::vector<store::ContentAddress> step_addrs;
    CommittedRelaxedInstance final_inst;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_bytes(b, ctx.serialize());
        put_digest(b, x_digest);
        put_bytes(b, init.serialize());
        put_u64(b, steps.size());
        for (const auto& s : steps) put_bytes(b, s.serialize());
        for (const auto& a : step_addrs) put_digest(b, a.digest);
        put_bytes(b, final_inst.serialize());
        return b;
    }

    Digest digest() const { return hash_tagged("fold-transcript", serialize()); }
};

/* The fused batch: final folded instance, its decrypted opening, the
 * published transcript, and the outcome of the fuse checks. A C1 failure is
 * reported, not thrown: it is the coordinator's signal to restart the batch
 * without the faulty contributors. */
struct MaterializedBatch {
    uint64_t batch_id = 0;
    std::vector<uint64_t> roster;
    CommittedRelaxedInstance instance;
    CommittedRelaxedWitness witness;
    FoldTranscript transcript;
    store::ContentAddress transcript_addr;
    bool public_consistent = false; // decrypted x, u match the public fold
    bool c1_ok = false;
    C1Failure c1_reason = C1Failure::None;

    bool fused_ok() const { return public_consistent && c1_ok; }
};

/* Final ceremony: decrypt the folded witness state, cross-check the
 * decrypted public components against the publicly folded instance, check
 * the committed-relaxed relation, and publish the transcript. */
inline MaterializedBatch collect_and_fuse(const ProtocolParams& pp, const BatchContext& bc,
                                          const AccumulatorState& acc,
                                          const std::vector<MkheKeyPair>& kps,
                                          const CommittedRelaxedInstance& init_inst,
                                          std::vector<nifs::FoldStepRecord> steps,
                                          store::Store& st) {
    const MkheContext& mk = pp.mk;
    MaterializedBatch out;
    out.batch_id = acc.batch_id;
    out.roster = acc.roster;
    out.instance = acc.inst;

    FieldVec x_dec = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.x, kps));
    FieldVec u_dec = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.u, kps));
    out.public_consistent = x_dec == acc.inst.x && u_dec == FieldVec{acc.inst.u};
    out.witness.E = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.E, kps));
    out.witness.r_E = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.rE, kps));
    out.witness.W = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.W, kps));
    out.witness.r_W = mkhe::slots_to_fields(mk, run_ceremony(mk, acc.rW, kps));
    out.c1_ok = check_c1(pp.f, pp.shape, out.instance, out.witness, pp.pp, &out.c1_reason);

    out.transcript.ctx = bc.fctx;
    out.transcript.x_digest = bc.x_digest;
    out.transcript.init = init_inst;
    out.transcript.steps = std::move(steps);
    for (const auto& s : out.transcript.steps)
        out.transcript.step_addrs.push_back(st.put(s.serialize()));
    out.transcript.final_inst = acc.inst;
    out.transcript_addr = st.put(out.transcript.serialize());
    return out;
}

/* Convenience driver: fold a whole roster in order and fuse. */
inline MaterializedBatch run_batch(const ProtocolParams& pp, const BatchContext& bc,
                                   const std::vector<UserContribution>& contributions,
                                   const std::vector<MkheKeyPair>& kps, store::Store& st) {
    if (contributions.empty()) throw InvalidBatchSize("empty batch");
    AccumulatorState acc = init_accumulator(pp, bc, contributions[0]);
    CommittedRelaxedInstance init_inst = acc.inst;
    std::vector<nifs::FoldStepRecord> steps;
    for (size_t i = 1; i < contributions.size(); i++)
        steps.push_back(fold_step_encrypted(pp, bc, acc, contributions[i], kps));
    return collect_and_fuse(pp, bc, acc, kps, init_inst, std::move(steps), st);
}

} // namespace zkadmit::pipeline
