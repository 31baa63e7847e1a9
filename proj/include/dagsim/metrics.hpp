#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dagsim/pipeline.hpp"
#include "dagsim/scenario.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

/// Lifecycle record of one transaction across the whole network.
struct TxStat {
    NodeId issuer = 0;
    double issued_at = 0.0;
    int honest_arrivals = 0;        // honest ledgers holding it solid
    double last_arrival = -1.0;     // latest honest solid arrival
    double disseminated_at = -1.0;  // set when it reaches every honest node
    double first_write = std::numeric_limits<double>::infinity();
};

struct DropRec {
    TransactionId tx;
    NodeId node = 0;
    DropReason reason = DropReason::Buffer;
    double time = 0.0;
};

struct BlacklistEvent {
    NodeId observer = 0;
    NodeId target = 0;
    double time = 0.0;
};

struct InboxSample {
    double time = 0.0;
    NodeId node = 0;
    NodeId issuer = 0;
    double scaled_len = 0.0;
};

struct ArrivalRec {
    TransactionId tx;
    NodeId node = 0;
    double time = 0.0;
};

struct NodeCounters {
    std::uint64_t issued = 0;
    std::uint64_t enqueued_own = 0;
    std::uint64_t accepted = 0;
    std::uint64_t scheduled = 0;
    std::uint64_t dropped_buffer = 0;
    std::uint64_t dropped_blacklist = 0;
    std::uint64_t dropped_expired = 0;
    std::uint64_t filtered_duplicate = 0;
    std::uint64_t filtered_too_old = 0;
    std::uint64_t filtered_from_blacklisted = 0;
};

struct ConsistencyReport {
    std::uint64_t checked = 0;
    std::uint64_t violations = 0;
    /// Example violations: (tx, honest nodes missing it or holding it unsolid).
    std::vector<std::pair<TransactionId, int>> examples;
};

/// Everything one simulation run produces.
struct RunResult {
    std::uint64_t seed = 0;
    int nodes = 0;
    int honest_count = 0;
    double duration = 0.0;
    std::vector<bool> honest;

    std::unordered_map<TransactionId, TxStat> txs;
    std::vector<DropRec> drops;
    std::vector<BlacklistEvent> blacklist_events;
    std::vector<InboxSample> inbox_samples;
    std::vector<ArrivalRec> arrivals;  // only when the scenario logs arrivals
    std::vector<NodeCounters> counters;
    std::uint64_t honest_honest_blacklists = 0;

    ConsistencyReport consistency;
    std::vector<std::size_t> ledger_sizes;
    std::vector<std::size_t> ledger_solid;
    std::vector<std::size_t> still_queued;

    std::vector<std::string> invariant_failures;
};

/// Collects events during a run; owned by the simulation instance.
class MetricsRecorder {
public:
    MetricsRecorder(int nodes, std::vector<bool> honest, bool log_arrivals);

    void on_issue(const Transaction& tx, double t);
    void on_solid_arrival(const TransactionId& id, NodeId node, double t);
    void on_write(const TransactionId& id, NodeId node, double t);
    void on_accept(NodeId node) { counters_[node].accepted++; }
    void on_enqueue_own(NodeId node) { counters_[node].enqueued_own++; }
    void on_schedule(NodeId node) { counters_[node].scheduled++; }
    void on_filtered(NodeId node, FilterVerdict v);
    void on_drop(const Transaction& tx, NodeId node, DropReason reason, double t);
    void on_blacklist(NodeId observer, NodeId target, double t);
    void on_inbox_sample(double t, NodeId node, NodeId issuer, double scaled);

    /// Moves the collected data into a RunResult shell.
    void finish(RunResult& out);

    int honest_count() const { return honest_count_; }

private:
    int nodes_;
    std::vector<bool> honest_;
    int honest_count_ = 0;
    bool log_arrivals_ = false;

    std::unordered_map<TransactionId, TxStat> txs_;
    std::vector<DropRec> drops_;
    std::vector<BlacklistEvent> events_;
    std::vector<InboxSample> samples_;
    std::vector<ArrivalRec> arrivals_;
    std::vector<NodeCounters> counters_;
    std::uint64_t honest_honest_ = 0;
};

// ---- analysis over finished runs ----

struct DrSeries {
    std::vector<double> time;                   // sample instants
    std::vector<std::vector<double>> per_node;  // [node][sample]
    std::vector<double> total;                  // [sample]
};

/// Sliding-window dissemination rate, sampled every cfg.sample_period.
DrSeries dissemination_series(const RunResult& run, const ScenarioConfig& cfg);

/// Mean dissemination rate per issuer over (t0, t1], in tx/s.
std::vector<double> mean_dr_per_node(const RunResult& run, int nodes, double t0, double t1);
double mean_dr_total(const RunResult& run, double t0, double t1);

struct LatencySummary {
    std::vector<std::vector<double>> per_node;  // sorted latencies, [node]
    std::vector<std::uint64_t> undelivered;     // issued but never disseminated
};
LatencySummary latency_summary(const RunResult& run, int nodes);

/// Empirical quantile of a sorted sample (linear interpolation).
double quantile(const std::vector<double>& sorted, double q);

struct CoveragePoint {
    double time = 0.0;
    double honest_fraction = 0.0;  // blacklisting honest nodes / all honest nodes
    double all_fraction = 0.0;     // same count / N (ceiling (N-1)/N)
};
std::vector<CoveragePoint> blacklist_coverage(const RunResult& run, NodeId attacker,
                                              const ScenarioConfig& cfg);

/// Time of the last honest blacklisting event against any attacker; -1 when
/// none occurred.
double last_blacklist_time(const RunResult& run);

// ---- CSV / plot output ----

void write_dr_csv(std::ostream& os, const std::vector<RunResult>& runs,
                  const ScenarioConfig& cfg);
void write_latency_csv(std::ostream& os, const std::vector<RunResult>& runs,
                       const ScenarioConfig& cfg);
void write_inbox_csv(std::ostream& os, const std::vector<RunResult>& runs);
void write_blacklist_csv(std::ostream& os, const std::vector<RunResult>& runs,
                         const ScenarioConfig& cfg);
void write_summary_json(std::ostream& os, const std::vector<RunResult>& runs,
                        const ScenarioConfig& cfg);
void write_aggregate_csv(std::ostream& os, const std::vector<RunResult>& runs,
                         const ScenarioConfig& cfg);

/// Gnuplot scripts that plot the CSVs above; written into `dir`.
void write_plot_scripts(const std::string& dir);

}  // namespace dagsim
