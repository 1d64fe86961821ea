#pragma once

#include "circuit.hpp"
#include "commit.hpp"
#include "mlsags.hpp"

namespace zkadmit::relation {

using commit::Commitment;
using commit::CommitParams;

/* Personhood credential record. The canonical body (version, holder key,
 * issuer key, attributes) is what gets hashed; the issuer signature covers
 * that hash and is deliberately outside the hashed bytes. */
struct Phc {
    uint64_t version = 1;
    uint64_t holder_pk = 0;
    uint64_t issuer_pk = 0;
    std::vector<uint64_t> attributes;
    ToySignature issuer_sig;

    std::vector<uint64_t> canonical_body() const {
        std::vector<uint64_t> body;
        body.reserve(3 + attributes.size());
        body.push_back(version);
        body.push_back(holder_pk);
        body.push_back(issuer_pk);
        body.insert(body.end(), attributes.begin(), attributes.end());
        return body;
    }
};

inline uint64_t phc_hash(const Field& f, const Phc& phc) {
    return field_hash(f, phc.canonical_body());
}

inline Phc issue_phc(const Field& f, const ToyKeyPair& issuer, uint64_t holder_pk,
                     const std::vector<uint64_t>& attributes, RandomStream& rng) {
    Phc phc;
    phc.holder_pk = holder_pk;
    phc.issuer_pk = issuer.pk;
    phc.attributes = attributes;
    phc.issuer_sig = toy_sign(f, issuer.sk, phc_hash(f, phc), rng);
    return phc;
}

struct RelationConfig {
    size_t num_attributes = 3;
};

/* Fixed layout of the public-input vector x. */
enum XIndex : size_t {
    kXHashPhc = 0,
    kXHolderSigR = 1,
    kXHolderSigS = 2,
    kXIssuerPk = 3,
    kXLen = 4,
};

/* All concrete values the admission circuit consumes. */
struct PhcAssignment {
    // public
    uint64_t hash_phc = 0;
    ToySignature holder_sig;
    uint64_t issuer_pk = 0;
    // witness
    uint64_t version = 0;
    uint64_t holder_pk = 0;
    std::vector<uint64_t> attributes;
    ToySignature issuer_sig;
};

/* Builds the admission circuit:
 *   (i)  x.hash_phc equals the in-circuit hash of the canonical body,
 *   (ii) the issuer signature verifies on hash_phc under x.pk_issuer,
 *  (iii) the holder signature in x verifies on hash_phc under W.pk_holder.
 * The emitted shape depends only on the config, never on values — every
 * client derives identical matrices. */
inline CircuitBuilder build_phc_circuit(const Field& f, const RelationConfig& cfg,
                                        const PhcAssignment& a) {
    if (a.attributes.size() != cfg.num_attributes)
        throw ParamMismatch("attribute count does not match relation config");
    CircuitBuilder b(f);
    Var x_hash = b.add_public(a.hash_phc);
    Var x_sig_r = b.add_public(a.holder_sig.R);
    Var x_sig_s = b.add_public(a.holder_sig.s);
    Var x_issuer = b.add_public(a.issuer_pk);

    Var w_version = b.add_witness(a.version);
    Var w_holder = b.add_witness(a.holder_pk);
    std::vector<Var> w_attrs;
    for (size_t i = 0; i < cfg.num_attributes; i++)
        w_attrs.push_back(b.add_witness(a.attributes[i]));
    Var w_isig_r = b.add_witness(a.issuer_sig.R);
    Var w_isig_s = b.add_witness(a.issuer_sig.s);

    std::vector<LinComb> body = {b.lc(w_version), b.lc(w_holder), b.lc(x_issuer)};
    for (Var v : w_attrs) body.push_back(b.lc(v));
    b.assert_eq(b.hash_gadget(body), b.lc(x_hash));

    b.schnorr_verify_gadget(b.lc(w_isig_r), b.lc(w_isig_s), b.lc(x_issuer), b.lc(x_hash));
    b.schnorr_verify_gadget(b.lc(x_sig_r), b.lc(x_sig_s), b.lc(w_holder), b.lc(x_hash));
    return b;
}

inline R1CSShape build_phc_relation(const Field& f, const RelationConfig& cfg = {}) {
    PhcAssignment zero;
    zero.attributes.assign(cfg.num_attributes, 0);
    return build_phc_circuit(f, cfg, zero).shape();
}

/* Honest-path assignment: the holder signs their credential hash, then the
 * full (x, W) vector pair is derived by executing the circuit. */
inline std::pair<FieldVec, FieldVec> generate_assignment(const Field& f, const RelationConfig& cfg,
                                                         const Phc& phc, uint64_t holder_sk,
                                                         RandomStream& rng) {
    PhcAssignment a;
    a.hash_phc = phc_hash(f, phc);
    a.holder_sig = toy_sign(f, holder_sk, a.hash_phc, rng);
    a.issuer_pk = phc.issuer_pk;
    a.version = phc.version;
    a.holder_pk = phc.holder_pk;
    a.attributes = phc.attributes;
    a.issuer_sig = phc.issuer_sig;
    CircuitBuilder b = build_phc_circuit(f, cfg, a);
    return {b.public_values(), b.witness_values()};
}

/* The Nova-side objects: public instance (Ē, u, W̄, x) and its opening
 * witness (E, r_E, W, r_W). */
struct CommittedRelaxedInstance {
    Commitment E_bar;
    uint64_t u = 0;
    Commitment W_bar;
    FieldVec x;

    bool operator==(const CommittedRelaxedInstance&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_commitment(b, E_bar);
        put_u64(b, u);
        put_commitment(b, W_bar);
        put_u64_vec(b, x);
        return b;
    }
};

struct CommittedRelaxedWitness {
    FieldVec E;
    FieldVec r_E;
    FieldVec W;
    FieldVec r_W;

    bool operator==(const CommittedRelaxedWitness&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64_vec(b, E);
        put_u64_vec(b, r_E);
        put_u64_vec(b, W);
        put_u64_vec(b, r_W);
        return b;
    }
};

/* Commitment parameter bundle for the three committed vector kinds. */
struct CommitParamSet {
    CommitParams E; // message length m_c, label "E"
    CommitParams W; // message length |W|, label "W"
    CommitParams T; // message length m_c, label "T"
};

inline constexpr size_t kCommitRows = 4;  // k
inline constexpr size_t kCommitRandLen = 4; // ℓ

inline CommitParamSet make_commit_params(const algebra::RingParams& rp, const Bytes& seed,
                                         const R1CSShape& shape) {
    CommitParamSet pp;
    pp.E = commit::gen_params(rp, seed, "E", kCommitRows, kCommitRandLen, shape.m_c);
    pp.W = commit::gen_params(rp, seed, "W", kCommitRows, kCommitRandLen, shape.num_witness);
    /* The cross-term key must equal the error-vector key: the three-term
     * fold Ē + v·T̄ + v²·Ēᵢ only opens to E + v·T + v²·Eᵢ when all three
     * commitments live under the same matrices. */
    pp.T = pp.E;
    return pp;
}

/* Client-side instance generation: fresh commitment randomness, E ← 0,
 * u ← 1, commitments to E and W. */
inline std::pair<CommittedRelaxedInstance, CommittedRelaxedWitness> client_generate(
    const Field& f, const R1CSShape& shape, const FieldVec& x, const FieldVec& W,
    const CommitParamSet& pp, RandomStream& rng) {
    if (!check_r1cs(f, shape, x, W)) throw NotSatisfied("assignment does not satisfy relation");
    CommittedRelaxedWitness wit;
    wit.E.assign(shape.m_c, 0);
    wit.W = W;
    wit.r_E.resize(pp.E.l);
    wit.r_W.resize(pp.W.l);
    for (auto& r : wit.r_E) r = f.sample(rng);
    for (auto& r : wit.r_W) r = f.sample(rng);
    CommittedRelaxedInstance inst;
    inst.E_bar = commit::commit_fields(pp.E, wit.E, wit.r_E);
    inst.u = 1;
    inst.W_bar = commit::commit_fields(pp.W, wit.W, wit.r_W);
    inst.x = x;
    return {inst, wit};
}

enum class C1Failure { None, EOpening, WOpening, Relaxed };

/* The committed-relaxed checker: commitment-opening consistency for both
 * commitments plus relaxed satisfiability. */
inline bool check_c1(const Field& f, const R1CSShape& shape,
                     const CommittedRelaxedInstance& inst, const CommittedRelaxedWitness& wit,
                     const CommitParamSet& pp, C1Failure* why = nullptr) {
    auto fail = [&](C1Failure reason) {
        if (why) *why = reason;
        return false;
    };
    if (inst.E_bar != commit::commit_fields(pp.E, wit.E, wit.r_E)) return fail(C1Failure::EOpening);
    if (inst.W_bar != commit::commit_fields(pp.W, wit.W, wit.r_W)) return fail(C1Failure::WOpening);
    if (!check_relaxed(f, shape, inst.x, inst.u, wit.W, wit.E)) return fail(C1Failure::Relaxed);
    if (why) *why = C1Failure::None;
    return true;
}

/* What a user hands to the batch: credential hash, seed public key, and the
 * committed instance-witness pair. */
struct ResCredential {
    uint64_t hash_phc = 0;
    uint64_t pk_seed = 0;
    CommittedRelaxedInstance instance;
    CommittedRelaxedWitness witness;
};

inline ResCredential make_res_credential(const Field& f, const Phc& phc,
                                         const CommittedRelaxedInstance& inst,
                                         const CommittedRelaxedWitness& wit,
                                         const mlsags::SeedKeyPair& seed_kp) {
    uint64_t h = phc_hash(f, phc);
    if (inst.x.size() != kXLen || inst.x[kXHashPhc] != h)
        throw InconsistentCredential("instance does not carry this credential's hash");
    ResCredential rc;
    rc.hash_phc = h;
    rc.pk_seed = seed_kp.pk;
    rc.instance = inst;
    rc.witness = wit;
    return rc;
}

} // namespace zkadmit::relation
