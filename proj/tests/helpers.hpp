#pragma once

// Shared fixtures for the test suite: cached protocol parameters (the
// constraint system and commitment keys are deterministic and take a moment
// to build) and factories for honest and corrupted instance-witness pairs.

#include "zkadmit/pipeline.hpp"

namespace zkt {

using namespace zkadmit;
using namespace zkadmit::relation;

inline const pipeline::ProtocolParams& params() {
    static pipeline::ProtocolParams pp = [] {
        algebra::AlgebraParams ap;
        RelationConfig rcfg;
        return pipeline::make_protocol_params(ap, rcfg, Bytes{'t', 'e', 's', 't'});
    }();
    return pp;
}

struct HonestPair {
    Phc phc;
    ToyKeyPair holder;
    mlsags::SeedKeyPair seed_kp;
    CommittedRelaxedInstance inst;
    CommittedRelaxedWitness wit;
    ResCredential cred;
};

inline HonestPair make_honest_pair(const pipeline::ProtocolParams& pp, const ToyKeyPair& issuer,
                                   RandomStream& rng) {
    HonestPair h;
    h.holder = toy_keygen(pp.f, rng);
    h.seed_kp = mlsags::lrs_keygen(rng);
    std::vector<uint64_t> attrs;
    for (size_t a = 0; a < pp.rcfg.num_attributes; a++) attrs.push_back(pp.f.sample(rng));
    h.phc = issue_phc(pp.f, issuer, h.holder.pk, attrs, rng);
    auto [x, W] = generate_assignment(pp.f, pp.rcfg, h.phc, h.holder.sk, rng);
    std::tie(h.inst, h.wit) = client_generate(pp.f, pp.shape, x, W, pp.pp, rng);
    h.cred = make_res_credential(pp.f, h.phc, h.inst, h.wit, h.seed_kp);
    return h;
}

/* A pair whose commitments open correctly but whose witness violates one
 * constraint: the committed-relaxed check must fail on it, and any fold that
 * absorbs it must produce a failing accumulator. */
inline std::pair<CommittedRelaxedInstance, CommittedRelaxedWitness>
make_corrupt_pair(const pipeline::ProtocolParams& pp, const HonestPair& h, size_t coord,
                  RandomStream& rng) {
    CommittedRelaxedWitness wit = h.wit;
    wit.W[coord % wit.W.size()] = pp.f.add(wit.W[coord % wit.W.size()], 1);
    for (auto& r : wit.r_W) r = pp.f.sample(rng);
    for (auto& r : wit.r_E) r = pp.f.sample(rng);
    CommittedRelaxedInstance inst = h.inst;
    inst.W_bar = commit::commit_fields(pp.pp.W, wit.W, wit.r_W);
    inst.E_bar = commit::commit_fields(pp.pp.E, wit.E, wit.r_E);
    return {inst, wit};
}

} // namespace zkt
