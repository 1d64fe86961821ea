// Command-line driver for the anonymous-admission protocol: runs full
// admission scenarios (credential generation through account provisioning)
// and emits cost/capacity curves from a gas-model profile.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "zkadmit/scenario.hpp"

namespace fs = std::filesystem;
using namespace zkadmit;

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw zkadmit::InvalidParams("cannot write " + path.string());
    out << text;
}

int cmd_run(const std::string& config_path, uint64_t* n, uint64_t* ring, std::string* backend,
            uint64_t* seed, const std::string& faults_path, const std::string& out_dir) {
    auto cfg = scenario::load_config_file(config_path);
    scenario::Scenario scn = scenario::scenario_from_config(cfg);
    if (n) scn.n = *n;
    if (ring) scn.ring = *ring;
    if (seed) scn.seed = *seed;
    if (backend) {
        if (*backend == "transparent") scn.backend = mkhe::Backend::Transparent;
        else if (*backend == "rlwe") scn.backend = mkhe::Backend::Rlwe;
        else throw InvalidParams("unknown backend: " + *backend);
    }
    if (!faults_path.empty()) {
        std::ifstream in(faults_path);
        if (!in) throw InvalidParams("cannot open fault plan: " + faults_path);
        std::stringstream ss;
        ss << in.rdbuf();
        scn.faults = scenario::parse_fault_plan(ss.str());
    }

    std::optional<store::Store> st;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        st.emplace(fs::path(out_dir) / "store");
    }
    scenario::RunMetrics m = scenario::run_scenario(scn, st ? &*st : nullptr);

    std::string report;
    for (const auto& line : m.to_lines()) report += line + "\n";
    std::cout << report;
    if (!out_dir.empty()) write_file(fs::path(out_dir) / "run.log", report);

    bool ok = m.all_honest_ok();
    std::cout << (ok ? "result: all honest users admitted and provisioned\n"
                     : "result: admission incomplete\n");
    return ok ? 0 : 1;
}

int cmd_costs(const std::string& profile_path, uint64_t n_max, uint64_t l_max,
              const std::string& out_dir) {
    auto cfg = scenario::load_config_file(profile_path);
    ledger::GasModel gm = scenario::gas_from_config(cfg);
    scenario::CostCurves cc = scenario::emit_cost_curves(gm, n_max, l_max);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "batch_costs.csv", cc.cost_csv);
        write_file(fs::path(out_dir) / "ring_costs.csv", cc.ring_csv);
        std::cout << "wrote " << out_dir << "/batch_costs.csv and " << out_dir
                  << "/ring_costs.csv\n";
    } else {
        std::cout << cc.cost_csv << "\n" << cc.ring_csv;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anonymous admission over folded committed instances"};
    app.require_subcommand(1);

    std::string config_path, faults_path, out_dir, backend;
    uint64_t n = 0, ring = 0, seed = 0;
    bool has_n = false, has_ring = false, has_seed = false, has_backend = false;

    CLI::App* run = app.add_subcommand("run", "Run a full admission scenario");
    run->add_option("--config", config_path, "Scenario configuration file")->required();
    run->add_option("--n", n, "Batch size override")->each([&](const std::string&) {
        has_n = true;
    });
    run->add_option("--ring", ring, "Ring size override")->each([&](const std::string&) {
        has_ring = true;
    });
    run->add_option("--backend", backend, "Ciphertext backend: transparent | rlwe")
        ->each([&](const std::string&) { has_backend = true; });
    run->add_option("--seed", seed, "Deterministic seed override")->each([&](const std::string&) {
        has_seed = true;
    });
    run->add_option("--faults", faults_path, "Fault plan file (lines: <user-index> <kind>)");
    run->add_option("--out", out_dir, "Directory for run.log and the transcript store");

    std::string profile_path;
    uint64_t n_max = 64, l_max = 24;
    CLI::App* costs = app.add_subcommand("costs", "Emit cost and capacity curves");
    costs->add_option("--profile", profile_path, "Gas model profile")->required();
    costs->add_option("--n-max", n_max, "Largest batch size in the curve");
    costs->add_option("--l-max", l_max, "Largest ring size in the curve");
    costs->add_option("--out", out_dir, "Directory for CSV output");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, has_n ? &n : nullptr, has_ring ? &ring : nullptr,
                           has_backend ? &backend : nullptr, has_seed ? &seed : nullptr,
                           faults_path, out_dir);
        return cmd_costs(profile_path, n_max, l_max, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
