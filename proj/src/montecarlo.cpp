#include "dagsim/montecarlo.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "dagsim/simulation.hpp"

namespace dagsim {

void check_run_invariants(const ScenarioConfig& cfg, const RunResult& run,
                          std::vector<std::string>& out) {
    auto note = [&](const std::string& msg) {
        out.push_back("seed " + std::to_string(run.seed) + ": " + msg);
    };

    if (run.honest_honest_blacklists > 0)
        note(std::to_string(run.honest_honest_blacklists) +
             " honest-honest blacklisting events");

    for (const auto& msg : run.invariant_failures) note(msg);

    // conservation: accepted + own-enqueued = scheduled + dropped + queued
    for (int n = 0; n < run.nodes; ++n) {
        const NodeCounters& c = run.counters[std::size_t(n)];
        std::uint64_t in = c.accepted + c.enqueued_own;
        std::uint64_t accounted = c.scheduled + c.dropped_buffer + c.dropped_blacklist +
                                  c.dropped_expired + run.still_queued[std::size_t(n)];
        if (in != accounted)
            note("conservation mismatch at node " + std::to_string(n) + ": in=" +
                 std::to_string(in) + " accounted=" + std::to_string(accounted));
    }

    if (!cfg.params.disable_solidification && run.consistency.violations > 0)
        note(std::to_string(run.consistency.violations) + " consistency violations (" +
             std::to_string(run.consistency.checked) + " checked)");

    // The physical write cap: per-node scheduled work can never exceed the
    // global writing power plus one tick of slack.
    double write_cap = cfg.params.nu * cfg.duration + cfg.params.tx_work + 1e-9;
    for (int n = 0; n < run.nodes; ++n) {
        double scheduled = double(run.counters[std::size_t(n)].scheduled) * cfg.params.tx_work;
        if (scheduled > write_cap)
            note("node " + std::to_string(n) + " scheduled " + std::to_string(scheduled) +
                 " work, above the writing power cap " + std::to_string(write_cap));
    }

    if (!cfg.params.disable_timestamp_order) {
        // The dissemination series is a last-arrival statistic: when a node
        // unblocks it releases a clump of arrivals, so windows jitter a few
        // percent above nu even though every write obeyed the cap above.
        // Checked after warmup with that slack; sustained excess would mean
        // transactions were written more than once.
        DrSeries series = dissemination_series(run, cfg);
        double warmup = 30.0 + cfg.rate_window;
        double cap = 1.10 * cfg.params.nu + cfg.params.tx_work / cfg.rate_window;
        for (std::size_t k = 0; k < series.time.size(); ++k) {
            if (series.time[k] <= warmup) continue;
            if (series.total[k] > cap) {
                note("total DR " + std::to_string(series.total[k]) + " above cap " +
                     std::to_string(cap) + " at t=" + std::to_string(series.time[k]));
                break;
            }
        }
    }
}

BatchResult run_batch(const ScenarioConfig& cfg, std::uint64_t base_seed) {
    cfg.validate();
    BatchResult batch;
    batch.runs.resize(std::size_t(cfg.runs));

    unsigned hw = std::thread::hardware_concurrency();
    if (hw > 1 && cfg.runs > 1) {
        std::vector<std::future<RunResult>> futures;
        futures.reserve(std::size_t(cfg.runs));
        for (int k = 0; k < cfg.runs; ++k)
            futures.push_back(std::async(std::launch::async, [&cfg, base_seed, k] {
                return Simulation(cfg, base_seed + std::uint64_t(k)).run();
            }));
        for (int k = 0; k < cfg.runs; ++k) batch.runs[std::size_t(k)] = futures[std::size_t(k)].get();
    } else {
        for (int k = 0; k < cfg.runs; ++k)
            batch.runs[std::size_t(k)] = Simulation(cfg, base_seed + std::uint64_t(k)).run();
    }

    for (const auto& run : batch.runs) check_run_invariants(cfg, run, batch.violations);
    return batch;
}

void write_outputs(const std::string& dir, const ScenarioConfig& cfg,
                   const BatchResult& batch, bool emit_plots) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    {
        std::ofstream os(dir + "/scenario.json");
        os << scenario_to_json(cfg) << '\n';
    }
    {
        std::ofstream os(dir + "/dr.csv");
        write_dr_csv(os, batch.runs, cfg);
    }
    {
        std::ofstream os(dir + "/latency.csv");
        write_latency_csv(os, batch.runs, cfg);
    }
    {
        std::ofstream os(dir + "/inbox.csv");
        write_inbox_csv(os, batch.runs);
    }
    {
        std::ofstream os(dir + "/blacklist.csv");
        write_blacklist_csv(os, batch.runs, cfg);
    }
    {
        std::ofstream os(dir + "/aggregate.csv");
        write_aggregate_csv(os, batch.runs, cfg);
    }
    {
        std::ofstream os(dir + "/summary.json");
        write_summary_json(os, batch.runs, cfg);
    }
    if (!batch.violations.empty()) {
        nlohmann::json j;
        j["scenario"] = cfg.name;
        j["violations"] = batch.violations;
        std::ofstream os(dir + "/violations.json");
        os << j.dump(2) << '\n';
    }
    if (emit_plots) write_plot_scripts(dir);
}

}  // namespace dagsim
