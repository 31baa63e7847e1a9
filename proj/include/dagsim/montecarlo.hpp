#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dagsim/metrics.hpp"
#include "dagsim/scenario.hpp"

namespace dagsim {

struct BatchResult {
    std::vector<RunResult> runs;
    /// Human-readable invariant violations across all runs; empty means pass.
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

/// Config-aware invariant checks for one finished run. Appends one line per
/// violation. Consistency is skipped when solidification is disabled (the
/// ablation exists to break it) and the rate-cap check when timestamp
/// ordering is disabled (catch-up bursts are the documented failure mode).
void check_run_invariants(const ScenarioConfig& cfg, const RunResult& run,
                          std::vector<std::string>& out);

/// Runs `cfg.runs` seeds (base_seed, base_seed+1, ...) and checks invariants.
BatchResult run_batch(const ScenarioConfig& cfg, std::uint64_t base_seed);

/// Writes dr/latency/inbox/blacklist/aggregate CSVs, scenario echo, summary
/// and violation reports (and gnuplot scripts on demand) into `dir`.
void write_outputs(const std::string& dir, const ScenarioConfig& cfg,
                   const BatchResult& batch, bool emit_plots);

}  // namespace dagsim
