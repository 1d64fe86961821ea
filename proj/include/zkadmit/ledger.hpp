#pragma once

#include "mlsags.hpp"
#include "pbs.hpp"

namespace zkadmit::ledger {

using pbs::BatchSubmission;
using pbs::ProofSystem;

/* Symbolic gas table. Defaults are the reference deployment profile: batch
 * settlement 577,720 gas; ring-signature provisioning 37,903 + 57,000 per
 * ring member (664,903 at the recommended ring size 11); a 30M-gas block
 * every 12 simulated seconds. Gas here is a cost model, not EVM execution. */
struct GasModel {
    uint64_t c_verify_folded = 577720;    // per-batch settlement transaction
    uint64_t c_verify_individual = 435150; // one non-folded proof verification (baseline curve)
    uint64_t c_mlsags_base = 37903;
    uint64_t c_mlsags_per_member = 57000;
    uint64_t c_store = 0;          // per-user storage surcharge at settlement
    uint64_t c_state_update = 664903; // per-user provisioning transaction (amortized model)
    uint64_t c_overhead = 0;       // extra per-batch settlement overhead (amortized model)
    uint64_t block_gas_budget = 30000000;
    uint64_t block_period_seconds = 12;

    bool operator==(const GasModel&) const = default;

    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, c_verify_folded);
        put_u64(b, c_verify_individual);
        put_u64(b, c_mlsags_base);
        put_u64(b, c_mlsags_per_member);
        put_u64(b, c_store);
        put_u64(b, c_state_update);
        put_u64(b, c_overhead);
        put_u64(b, block_gas_budget);
        put_u64(b, block_period_seconds);
        return b;
    }
};

inline uint64_t mlsags_gas(const GasModel& m, uint64_t ring_size) {
    return m.c_mlsags_base + ring_size * m.c_mlsags_per_member;
}

/* Reference cost of settling N admissions one-by-one without folding: each
 * user pays one proof verification plus their state update. */
inline uint64_t baseline_cost(const GasModel& m, uint64_t n) {
    return n * (m.c_verify_individual + m.c_state_update);
}

/* Chain-side gas per admitted user at batch size N: the settlement cost is
 * shared N ways, the state update is not. Strictly decreasing in N. */
inline double amortized_cost(const GasModel& m, uint64_t n) {
    if (n == 0) throw InvalidBatchSize("amortized cost needs a nonempty batch");
    return double(m.c_verify_folded + m.c_overhead) / double(n) + double(m.c_state_update);
}

struct Capacity {
    double users_per_block = 0;
    double users_per_second = 0;
};

inline Capacity capacity(const GasModel& m, uint64_t n) {
    Capacity c;
    c.users_per_block = double(m.block_gas_budget) / amortized_cost(m, n);
    c.users_per_second = c.users_per_block / double(m.block_period_seconds);
    return c;
}

/* Outcome of one submitted transaction. `reason` is empty on acceptance and
 * carries the contract's verbatim rejection string otherwise. */
struct TxReceipt {
    bool accepted = false;
    std::string reason;
    uint64_t gas = 0;
    uint64_t block = 0;
};

/* Deterministic chain state: two append-only registries, symbolic gas
 * accounting, and a 12-second block clock. Single-threaded by design;
 * concurrent producers must serialize their submissions. */
class LedgerState {
  public:
    explicit LedgerState(const GasModel& model = GasModel{}) : model_(model) {}

    const GasModel& model() const { return model_; }
    uint64_t gas_used() const { return gas_used_; }
    uint64_t block_height() const { return block_height_; }
    uint64_t time_seconds() const { return block_height_ * model_.block_period_seconds; }
    const std::vector<std::string>& tx_log() const { return log_; }

    bool phc_registered(uint64_t hash_phc) const { return phc_registry_.count(hash_phc) != 0; }
    bool seed_registered(uint64_t pk_seed) const { return seed_index_.count(pk_seed) != 0; }
    bool soul_registered(uint64_t key_image) const { return soul_registry_.count(key_image) != 0; }
    size_t admitted_count() const { return phc_registry_.size(); }
    size_t provisioned_count() const { return soul_registry_.size(); }
    std::optional<uint64_t> soul_of(uint64_t key_image) const {
        auto it = soul_registry_.find(key_image);
        if (it == soul_registry_.end()) return std::nullopt;
        return it->second;
    }
    std::vector<uint64_t> registered_seeds() const {
        return std::vector<uint64_t>(seed_index_.begin(), seed_index_.end());
    }

    /* Pre-state: registry entries that exist at chain genesis (e.g. earlier
     * cohorts whose keys populate ring decoys). Not a transaction; no gas. */
    void genesis_register(uint64_t hash_phc, uint64_t pk_seed) {
        phc_registry_.emplace(hash_phc, pk_seed);
        seed_index_.insert(pk_seed);
    }

    void tick() {
        block_height_++;
        block_gas_ = 0;
    }

    /* Batch settlement (the verifier contract): check the proof and the
     * context binding, refuse any credential hash already registered (or
     * repeated inside the batch), then store every pair atomically.
     * Verification gas is charged even on rejection; storage gas only on
     * acceptance. */
    TxReceipt verifier_submit(const BatchSubmission& sub, const ProofSystem& ps) {
        const pipeline::ProtocolParams& pp = *ps.params;
        uint64_t verify_gas = model_.c_verify_folded;
        if (sub.X.empty()) return charge(false, "Verification failed", verify_gas, "settle n=0");

        // The statement's context must commit to this exact admission set.
        Digest bound = nifs::fold_binding_digest(pp.vk, pipeline::admission_set_digest(sub.X));
        bool ok = bound == sub.statement.ctx.binding &&
                  sub.statement.x_digest == pipeline::admission_set_digest(sub.X) &&
                  pbs::verify_settlement(ps, sub.statement, sub.proof);
        std::string what = "settle n=" + std::to_string(sub.X.size());
        if (!ok) return charge(false, "Verification failed", verify_gas, what);

        std::set<uint64_t> fresh;
        for (const auto& p : sub.X)
            if (phc_registry_.count(p.hash_phc) || !fresh.insert(p.hash_phc).second)
                return charge(false, "Already registered", verify_gas, what);

        for (const auto& p : sub.X) {
            phc_registry_.emplace(p.hash_phc, p.pk_seed);
            seed_index_.insert(p.pk_seed);
        }
        return charge(true, "", verify_gas + sub.X.size() * model_.c_store, what);
    }

    /* Account provisioning (the soul registry contract): every ring member
     * must be a registered seed key, the ring signature must verify, and
     * the key image must be fresh — one account per admitted person. */
    TxReceipt soul_register(const mlsags::RingSignature& sig, const std::vector<uint64_t>& ring,
                            uint64_t addr_soul) {
        std::string what = "provision ring=" + std::to_string(ring.size());
        bool ring_ok = !ring.empty();
        for (uint64_t pk : ring) ring_ok = ring_ok && seed_index_.count(pk) != 0;
        if (!ring_ok) return charge(false, "The ring of public keys is invalid", 0, what);

        uint64_t gas = mlsags_gas(model_, ring.size());
        if (!mlsags::lrs_verify(soul_bind_message(addr_soul), ring, sig))
            return charge(false, "Verification failed", gas, what);
        if (soul_registry_.count(sig.y0))
            return charge(false, "Already provisioned", gas, what);
        soul_registry_.emplace(sig.y0, addr_soul);
        return charge(true, "", gas, what);
    }

    static Bytes soul_bind_message(uint64_t addr_soul) {
        Bytes b;
        put_str(b, "zk-ams/soul-bind");
        put_u64(b, addr_soul);
        return b;
    }

    /* Canonical snapshot of the machine state (registries, gas, clock) —
     * byte-identical across runs with identical inputs. */
    Bytes serialize() const {
        Bytes b;
        put_u32(b, kEncodingVersion);
        put_u64(b, phc_registry_.size());
        for (const auto& [h, pk] : phc_registry_) {
            put_u64(b, h);
            put_u64(b, pk);
        }
        put_u64(b, soul_registry_.size());
        for (const auto& [y0, addr] : soul_registry_) {
            put_u64(b, y0);
            put_u64(b, addr);
        }
        put_u64(b, gas_used_);
        put_u64(b, block_height_);
        put_u64(b, block_gas_);
        return b;
    }

    Digest snapshot_digest() const { return hash_tagged("ledger-state", serialize()); }

  private:
    TxReceipt charge(bool accepted, const std::string& reason, uint64_t gas,
                     const std::string& what) {
        if (gas > model_.block_gas_budget) throw InvalidParams("transaction exceeds block gas");
        if (block_gas_ + gas > model_.block_gas_budget) tick(); // defer to the next block
        block_gas_ += gas;
        gas_used_ += gas;
        TxReceipt r{accepted, reason, gas, block_height_};
        log_.push_back("block=" + std::to_string(block_height_) + " " + what + " gas=" +
                       std::to_string(gas) + (accepted ? " accept" : " reject \"" + reason + "\""));
        return r;
    }

    GasModel model_;
    std::map<uint64_t, uint64_t> phc_registry_;  // hash_phc -> pk_seed
    std::map<uint64_t, uint64_t> soul_registry_; // key image -> soul address
    std::set<uint64_t> seed_index_;              // registered pk_seed values
    uint64_t gas_used_ = 0;
    uint64_t block_height_ = 0;
    uint64_t block_gas_ = 0;
    std::vector<std::string> log_;
};

} // namespace zkadmit::ledger
