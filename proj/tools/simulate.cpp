#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dagsim/montecarlo.hpp"
#include "dagsim/scenario.hpp"

namespace {

dagsim::ScenarioConfig load_scenario(const std::string& spec) {
    auto names = dagsim::builtin_scenario_names();
    for (const auto& name : names)
        if (name == spec) return dagsim::builtin_scenario(name);

    std::ifstream in(spec);
    if (!in) throw dagsim::ConfigError("cannot open scenario file '" + spec + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return dagsim::scenario_from_json(buf.str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for reputation-based DAG-ledger access control"};

    std::string scenario;
    std::uint64_t seed = 1;
    int runs = -1;
    double duration = -1.0;
    std::string out_dir = "out";
    bool disable_solidification = false;
    bool disable_timestamp_order = false;
    bool emit_plots = false;
    bool list_scenarios = false;
    std::string print_scenario;

    app.add_option("--scenario", scenario,
                   "Built-in scenario name or path to a scenario JSON file");
    app.add_option("--seed", seed, "Base seed; run k uses seed + k");
    app.add_option("--runs", runs, "Monte-Carlo run count (overrides scenario)");
    app.add_option("--duration", duration, "Simulated seconds (overrides scenario)");
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--disable-solidification", disable_solidification,
                 "Ablation: no solidity gate, no solidification requests");
    app.add_flag("--disable-timestamp-order", disable_timestamp_order,
                 "Ablation: FIFO inbox queues instead of timestamp order");
    app.add_flag("--emit-plots", emit_plots, "Write gnuplot scripts next to the CSVs");
    app.add_flag("--list-scenarios", list_scenarios, "List built-in scenarios and exit");
    app.add_option("--print-scenario", print_scenario,
                   "Print a built-in scenario as JSON and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_scenarios) {
            for (const auto& name : dagsim::builtin_scenario_names())
                std::cout << name << '\n';
            return 0;
        }
        if (!print_scenario.empty()) {
            std::cout << dagsim::scenario_to_json(dagsim::builtin_scenario(print_scenario))
                      << '\n';
            return 0;
        }
        if (scenario.empty()) {
            std::cerr << "error: --scenario is required (see --list-scenarios)\n";
            return 2;
        }

        dagsim::ScenarioConfig cfg = load_scenario(scenario);
        if (runs > 0) cfg.runs = runs;
        if (duration > 0) cfg.duration = duration;
        if (disable_solidification) cfg.params.disable_solidification = true;
        if (disable_timestamp_order) cfg.params.disable_timestamp_order = true;
        cfg.validate();

        dagsim::BatchResult batch = dagsim::run_batch(cfg, seed);
        dagsim::write_outputs(out_dir, cfg, batch, emit_plots);

        std::uint64_t issued = 0, disseminated = 0, violations = 0;
        for (const auto& run : batch.runs) {
            for (const auto& [id, stat] : run.txs) {
                ++issued;
                if (stat.disseminated_at >= 0.0) ++disseminated;
            }
            violations += run.consistency.violations;
        }
        std::cout << "scenario " << cfg.name << ": " << cfg.runs << " runs, " << issued
                  << " issued, " << disseminated << " disseminated, " << violations
                  << " consistency violations\n";
        std::cout << "outputs written to " << out_dir << '\n';

        if (!batch.ok()) {
            std::cerr << "invariant violations:\n";
            for (const auto& v : batch.violations) std::cerr << "  " << v << '\n';
            return 1;
        }
        return 0;
    } catch (const dagsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
