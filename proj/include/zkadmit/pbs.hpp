#pragma once

#include "pipeline.hpp"

namespace zkadmit::pbs {

using namespace zkadmit::relation;
using commit::Commitment;
using pipeline::AdmissionPair;
using pipeline::MaterializedBatch;
using pipeline::ProtocolParams;

/* A submission not settled within this many blocks is expired and its users
 * re-queued by the coordinator. */
inline constexpr uint64_t kSubmissionTimeoutBlocks = 10;

/* The publicly fixed padding pair folded in as the final step: the all-zero
 * instance (x = 0, u = 0, W = E = 0) with zero commitment randomness. It
 * satisfies the relaxed relation identically, so the extra fold costs the
 * verifier nothing and hides the batch size boundary. */
struct PaddingPair {
    CommittedRelaxedInstance inst;
    CommittedRelaxedWitness wit;
};

inline PaddingPair make_padding_pair(const ProtocolParams& pp) {
    PaddingPair pad;
    pad.inst.x.assign(pp.shape.num_public, 0);
    pad.inst.u = 0;
    pad.inst.E_bar = commit::zero_commitment(pp.pp.E);
    pad.inst.W_bar = commit::zero_commitment(pp.pp.W);
    pad.wit.E.assign(pp.shape.m_c, 0);
    pad.wit.r_E.assign(pp.pp.E.l, 0);
    pad.wit.W.assign(pp.shape.num_witness, 0);
    pad.wit.r_W.assign(pp.pp.W.l, 0);
    return pad;
}

/* The public settlement claim: folding the padding pair into the batch
 * accumulator at the recorded step, under the recorded context, yields the
 * final accumulator. */
struct SettlementStatement {
    nifs::FoldContext ctx;
    Digest x_digest{};
    uint64_t step = 0;
    CommittedRelaxedInstance acc_before;
    Commitment T_bar_pad;
    CommittedRelaxedInstance acc_after;

    bool operator==(const SettlementStatement&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_bytes(b, ctx.serialize());
        put_digest(b, x_digest);
        put_u64(b, step);
        put_bytes(b, acc_before.serialize());
        put_commitment(b, T_bar_pad);
        put_bytes(b, acc_after.serialize());
        return b;
    }

    Digest digest() const { return hash_tagged("settlement-statement", serialize()); }
};

inline constexpr uint32_t kProofBackendTransparent = 1;

/* Settlement proof under a pluggable backend. The one shipped backend is
 * TRANSPARENT: the payload is the final accumulator's witness opening bound
 * to the statement digest, and verification re-executes every check. It is
 * NOT zero-knowledge; it exists so the contract logic and every binding can
 * be exercised end-to-end. */
struct SettlementProof {
    uint32_t backend = kProofBackendTransparent;
    Bytes payload;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u32(b, backend);
        put_bytes(b, payload);
        return b;
    }
};

struct ProofSystem {
    uint32_t backend = kProofBackendTransparent;
    const ProtocolParams* params = nullptr;
};

inline ProofSystem make_proof_system(const ProtocolParams& pp) { return {kProofBackendTransparent, &pp}; }

/* Result of folding the padding pair into a materialized batch. */
struct PaddingFold {
    FieldVec T;
    SettlementStatement statement;
    CommittedRelaxedWitness witness; // opening of statement.acc_after
    uint64_t challenge = 0;
};

inline PaddingFold padding_fold(const ProtocolParams& pp, const MaterializedBatch& batch,
                                const PaddingPair& pad) {
    if (!batch.fused_ok()) throw NotSatisfied("batch accumulator failed materialization checks");
    uint64_t step = batch.roster.size(); // init consumed 0, folds 1..N-1
    FieldVec r_T(pp.pp.T.l, 0);
    nifs::FoldResult fr =
        nifs::fold_plain(pp.f, pp.rp, pp.shape, pp.pp, batch.transcript.ctx, batch.instance,
                         batch.witness, pad.inst, pad.wit, r_T, step);
    PaddingFold out;
    out.T = nifs::compute_cross_term(pp.f, pp.shape, batch.instance.x, batch.instance.u,
                                     batch.witness.W, pad.inst.x, pad.inst.u, pad.wit.W);
    out.statement.ctx = batch.transcript.ctx;
    out.statement.x_digest = batch.transcript.x_digest;
    out.statement.step = step;
    out.statement.acc_before = batch.instance;
    out.statement.T_bar_pad = fr.T_bar;
    out.statement.acc_after = fr.instance;
    out.witness = fr.witness;
    out.challenge = fr.challenge;
    return out;
}

namespace detail {

inline CommittedRelaxedWitness read_witness(ByteReader& r) {
    if (r.u32() != kEncodingVersion) throw IntegrityError("unsupported encoding");
    CommittedRelaxedWitness w;
    w.E = r.u64_vec();
    w.r_E = r.u64_vec();
    w.W = r.u64_vec();
    w.r_W = r.u64_vec();
    return w;
}

enum class SettleFailure { None, NifsConsistency, Satisfiability, FixedPadding };

/* The three settlement conditions, shared between prover and verifier: the
 * padding operand is the canonical public pair, the final accumulator is
 * the deterministic fold of the statement's operands, and the claimed
 * witness opens it. */
inline SettleFailure check_settlement(const ProtocolParams& pp, const SettlementStatement& st,
                                      const CommittedRelaxedWitness& wit) {
    PaddingPair pad = make_padding_pair(pp);
    if (pad.inst.x.size() != st.acc_before.x.size()) return SettleFailure::FixedPadding;
    uint64_t v = nifs::derive_challenge(pp.f, st.ctx, st.acc_before.E_bar, st.acc_before.W_bar,
                                        pad.inst.E_bar, pad.inst.W_bar, st.T_bar_pad, st.step);
    CommittedRelaxedInstance folded =
        nifs::fold_instances(pp.f, pp.rp, st.acc_before, pad.inst, st.T_bar_pad, v);
    if (!(folded == st.acc_after)) return SettleFailure::NifsConsistency;
    if (!check_c1(pp.f, pp.shape, st.acc_after, wit, pp.pp))
        return SettleFailure::Satisfiability;
    return SettleFailure::None;
}

} // namespace detail

/* Produces a settlement proof, refusing if any settlement condition fails.
 * The refusal message names the violated condition. */
inline SettlementProof prove_settlement(const ProofSystem& ps, const SettlementStatement& st,
                                        const CommittedRelaxedWitness& wit) {
    if (ps.backend != kProofBackendTransparent) throw InvalidParams("unknown proof backend");
    switch (detail::check_settlement(*ps.params, st, wit)) {
        case detail::SettleFailure::FixedPadding:
            throw ProofRefused("padding operand is not the canonical public pair");
        case detail::SettleFailure::NifsConsistency:
            throw ProofRefused("final accumulator does not match the deterministic fold");
        case detail::SettleFailure::Satisfiability:
            throw ProofRefused("final accumulator fails the committed-relaxed check");
        case detail::SettleFailure::None:
            break;
    }
    SettlementProof proof;
    proof.backend = kProofBackendTransparent;
    put_digest(proof.payload, st.digest());
    put_bytes(proof.payload, wit.serialize());
    return proof;
}

/* Re-executes every settlement condition against the statement; any parse
 * error, binding mismatch, or failed condition rejects. */
inline bool verify_settlement(const ProofSystem& ps, const SettlementStatement& st,
                              const SettlementProof& proof) {
    if (proof.backend != kProofBackendTransparent || ps.backend != kProofBackendTransparent)
        return false;
    try {
        ByteReader r(proof.payload);
        if (read_digest(r) != st.digest()) return false;
        Bytes wb = r.bytes();
        if (!r.done()) return false;
        ByteReader wr(wb);
        CommittedRelaxedWitness wit = detail::read_witness(wr);
        if (!wr.done()) return false;
        return detail::check_settlement(*ps.params, st, wit) == detail::SettleFailure::None;
    } catch (const std::exception&) {
        return false;
    }
}

/* What the chain consumes: the admission set in fold order plus the
 * settlement claim and its proof. */
struct BatchSubmission {
    std::vector<AdmissionPair> X;
    SettlementStatement statement;
    SettlementProof proof;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, X.size());
        for (const auto& p : X) {
            put_u64(b, p.hash_phc);
            put_u64(b, p.pk_seed);
        }
        put_bytes(b, statement.serialize());
        put_bytes(b, proof.serialize());
        return b;
    }
};

/* Compacts the participants' credentials into the admission set. The set
 * must reproduce, byte for byte, the digest that every fold challenge of
 * the batch was bound to — so a reordered, dropped, or substituted entry is
 * caught here before anything reaches the chain. */
inline BatchSubmission assemble_submission(const MaterializedBatch& batch,
                                           const SettlementStatement& st,
                                           const SettlementProof& proof,
                                           const std::vector<ResCredential>& credentials) {
    BatchSubmission sub;
    for (const auto& c : credentials) sub.X.push_back({c.hash_phc, c.pk_seed});
    if (pipeline::admission_set_digest(sub.X) != batch.transcript.x_digest)
        throw CtxBindingError("admission set does not match the folded batch");
    if (st.x_digest != batch.transcript.x_digest)
        throw CtxBindingError("statement is bound to a different batch");
    sub.statement = st;
    sub.proof = proof;
    return sub;
}

} // namespace zkadmit::pbs
