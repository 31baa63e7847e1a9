#include "dagsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include <json.hpp>

namespace dagsim {

MetricsRecorder::MetricsRecorder(int nodes, std::vector<bool> honest, bool log_arrivals)
    : nodes_(nodes), honest_(std::move(honest)), log_arrivals_(log_arrivals) {
    counters_.resize(std::size_t(nodes));
    for (bool h : honest_)
        if (h) ++honest_count_;
}

void MetricsRecorder::on_issue(const Transaction& tx, double t) {
    counters_[tx.id.issuer].issued++;
    TxStat stat;
    stat.issuer = tx.id.issuer;
    stat.issued_at = t;
    txs_.emplace(tx.id, stat);
}

void MetricsRecorder::on_solid_arrival(const TransactionId& id, NodeId node, double t) {
    if (!honest_[node]) return;
    auto it = txs_.find(id);
    if (it == txs_.end()) return;  // genesis
    TxStat& stat = it->second;
    stat.honest_arrivals++;
    stat.last_arrival = t;
    if (stat.honest_arrivals == honest_count_) stat.disseminated_at = t;
    if (log_arrivals_) arrivals_.push_back({id, node, t});
}

void MetricsRecorder::on_write(const TransactionId& id, NodeId node, double t) {
    if (!honest_[node]) return;
    auto it = txs_.find(id);
    if (it == txs_.end()) return;
    it->second.first_write = std::min(it->second.first_write, t);
}

void MetricsRecorder::on_filtered(NodeId node, FilterVerdict v) {
    switch (v) {
        case FilterVerdict::Duplicate: counters_[node].filtered_duplicate++; break;
        case FilterVerdict::TooOld: counters_[node].filtered_too_old++; break;
        case FilterVerdict::FromBlacklisted:
            counters_[node].filtered_from_blacklisted++;
            break;
        case FilterVerdict::Accept: break;
    }
}

void MetricsRecorder::on_drop(const Transaction& tx, NodeId node, DropReason reason,
                              double t) {
    switch (reason) {
        case DropReason::Buffer: counters_[node].dropped_buffer++; break;
        case DropReason::BlacklistTrigger: counters_[node].dropped_blacklist++; break;
        case DropReason::Expired: counters_[node].dropped_expired++; break;
    }
    drops_.push_back({tx.id, node, reason, t});
}

void MetricsRecorder::on_blacklist(NodeId observer, NodeId target, double t) {
    events_.push_back({observer, target, t});
    if (honest_[observer] && honest_[target]) ++honest_honest_;
}

void MetricsRecorder::on_inbox_sample(double t, NodeId node, NodeId issuer, double scaled) {
    samples_.push_back({t, node, issuer, scaled});
}

void MetricsRecorder::finish(RunResult& out) {
    out.nodes = nodes_;
    out.honest = honest_;
    out.honest_count = honest_count_;
    out.txs = std::move(txs_);
    out.drops = std::move(drops_);
    out.blacklist_events = std::move(events_);
    out.inbox_samples = std::move(samples_);
    out.arrivals = std::move(arrivals_);
    out.counters = std::move(counters_);
    out.honest_honest_blacklists = honest_honest_;
}

namespace {

/// Sorted dissemination times per issuer.
std::vector<std::vector<double>> dissem_times(const RunResult& run, int nodes) {
    std::vector<std::vector<double>> per(static_cast<std::size_t>(nodes));
    for (const auto& [id, stat] : run.txs)
        if (stat.disseminated_at >= 0.0) per[stat.issuer].push_back(stat.disseminated_at);
    for (auto& v : per) std::sort(v.begin(), v.end());
    return per;
}

std::size_t count_in_window(const std::vector<double>& sorted, double t0, double t1) {
    auto lo = std::upper_bound(sorted.begin(), sorted.end(), t0);
    auto hi = std::upper_bound(sorted.begin(), sorted.end(), t1);
    return std::size_t(hi - lo);
}

}  // namespace

DrSeries dissemination_series(const RunResult& run, const ScenarioConfig& cfg) {
    DrSeries out;
    auto per = dissem_times(run, cfg.nodes);
    double w = cfg.rate_window;
    for (double t = cfg.sample_period; t <= cfg.duration + 1e-9; t += cfg.sample_period)
        out.time.push_back(t);
    out.per_node.assign(std::size_t(cfg.nodes), std::vector<double>(out.time.size(), 0.0));
    out.total.assign(out.time.size(), 0.0);
    for (int n = 0; n < cfg.nodes; ++n) {
        for (std::size_t k = 0; k < out.time.size(); ++k) {
            double t = out.time[k];
            double v = double(count_in_window(per[std::size_t(n)], t - w, t)) / w;
            out.per_node[std::size_t(n)][k] = v;
            out.total[k] += v;
        }
    }
    return out;
}

std::vector<double> mean_dr_per_node(const RunResult& run, int nodes, double t0, double t1) {
    auto per = dissem_times(run, nodes);
    std::vector<double> out(std::size_t(nodes), 0.0);
    for (int n = 0; n < nodes; ++n)
        out[std::size_t(n)] = double(count_in_window(per[std::size_t(n)], t0, t1)) / (t1 - t0);
    return out;
}

double mean_dr_total(const RunResult& run, double t0, double t1) {
    std::size_t count = 0;
    for (const auto& [id, stat] : run.txs)
        if (stat.disseminated_at > t0 && stat.disseminated_at <= t1) ++count;
    return double(count) / (t1 - t0);
}

LatencySummary latency_summary(const RunResult& run, int nodes) {
    LatencySummary out;
    out.per_node.resize(std::size_t(nodes));
    out.undelivered.assign(std::size_t(nodes), 0);
    for (const auto& [id, stat] : run.txs) {
        if (stat.disseminated_at >= 0.0)
            out.per_node[stat.issuer].push_back(stat.disseminated_at - stat.issued_at);
        else
            out.undelivered[stat.issuer]++;
    }
    for (auto& v : out.per_node) std::sort(v.begin(), v.end());
    return out;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (sorted.size() == 1) return sorted[0];
    double pos = q * double(sorted.size() - 1);
    std::size_t lo = std::size_t(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

std::vector<CoveragePoint> blacklist_coverage(const RunResult& run, NodeId attacker,
                                              const ScenarioConfig& cfg) {
    std::vector<double> honest_event_times;
    for (const auto& ev : run.blacklist_events)
        if (ev.target == attacker && run.honest[ev.observer])
            honest_event_times.push_back(ev.time);
    std::sort(honest_event_times.begin(), honest_event_times.end());

    std::vector<CoveragePoint> out;
    for (double t = 0.0; t <= cfg.duration + 1e-9; t += cfg.sample_period) {
        auto it = std::upper_bound(honest_event_times.begin(), honest_event_times.end(), t);
        double count = double(it - honest_event_times.begin());
        out.push_back({t, count / double(run.honest_count), count / double(cfg.nodes)});
    }
    return out;
}

double last_blacklist_time(const RunResult& run) {
    double last = -1.0;
    for (const auto& ev : run.blacklist_events)
        if (run.honest[ev.observer] && !run.honest[ev.target])
            last = std::max(last, ev.time);
    return last;
}

// ---- output ----

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void write_dr_csv(std::ostream& os, const std::vector<RunResult>& runs,
                  const ScenarioConfig& cfg) {
    os << "run,time,node,dr,scaled_dr\n";
    auto weights = cfg.reputation_weights.empty()
                       ? zipf_weights(cfg.nodes, cfg.zipf_exponent)
                       : cfg.reputation_weights;
    // scaled_dr uses the initial weight of each node; reputation changes are
    // recorded in the scenario config for replotting
    for (std::size_t r = 0; r < runs.size(); ++r) {
        DrSeries series = dissemination_series(runs[r], cfg);
        for (std::size_t k = 0; k < series.time.size(); ++k)
            for (int n = 0; n < cfg.nodes; ++n)
                os << r << ',' << fmt(series.time[k]) << ',' << n << ','
                   << fmt(series.per_node[std::size_t(n)][k]) << ','
                   << fmt(series.per_node[std::size_t(n)][k] / weights[std::size_t(n)])
                   << '\n';
    }
}

void write_latency_csv(std::ostream& os, const std::vector<RunResult>& runs,
                       const ScenarioConfig& cfg) {
    os << "run,node,tx,latency\n";
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::pair<TransactionId, const TxStat*>> rows;
        rows.reserve(runs[r].txs.size());
        for (const auto& [id, stat] : runs[r].txs) rows.emplace_back(id, &stat);
        std::sort(rows.begin(), rows.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [id, stat] : rows) {
            if (stat->disseminated_at >= 0.0)
                os << r << ',' << id.issuer << ',' << id.str() << ','
                   << fmt(stat->disseminated_at - stat->issued_at) << '\n';
            else
                os << r << ',' << id.issuer << ',' << id.str() << ",inf\n";
        }
    }
    (void)cfg;
}

void write_inbox_csv(std::ostream& os, const std::vector<RunResult>& runs) {
    os << "run,time,observer,issuer,scaled_len\n";
    for (std::size_t r = 0; r < runs.size(); ++r)
        for (const auto& s : runs[r].inbox_samples)
            os << r << ',' << fmt(s.time) << ',' << s.node << ',' << s.issuer << ','
               << fmt(s.scaled_len) << '\n';
}

void write_blacklist_csv(std::ostream& os, const std::vector<RunResult>& runs,
                         const ScenarioConfig& cfg) {
    os << "run,time,coverage_honest,coverage_all\n";
    if (cfg.attackers.empty()) return;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        std::vector<std::vector<CoveragePoint>> per;
        for (const auto& a : cfg.attackers)
            per.push_back(blacklist_coverage(runs[r], a.node, cfg));
        for (std::size_t k = 0; k < per[0].size(); ++k) {
            double ch = 0, ca = 0;
            for (const auto& series : per) {
                ch += series[k].honest_fraction;
                ca += series[k].all_fraction;
            }
            os << r << ',' << fmt(per[0][k].time) << ',' << fmt(ch / double(per.size()))
               << ',' << fmt(ca / double(per.size())) << '\n';
        }
    }
}

void write_aggregate_csv(std::ostream& os, const std::vector<RunResult>& runs,
                         const ScenarioConfig& cfg) {
    os << "time,total_dr_mean,total_dr_min,total_dr_max,mean_latency\n";
    std::vector<DrSeries> series;
    series.reserve(runs.size());
    for (const auto& run : runs) series.push_back(dissemination_series(run, cfg));

    // mean latency over transactions disseminated in the trailing window
    auto mean_latency_at = [&](const RunResult& run, double t) {
        double sum = 0;
        std::size_t n = 0;
        for (const auto& [id, stat] : run.txs) {
            if (stat.disseminated_at >= 0.0 &&
                stat.disseminated_at > t - cfg.rate_window && stat.disseminated_at <= t) {
                sum += stat.disseminated_at - stat.issued_at;
                ++n;
            }
        }
        return n ? sum / double(n) : 0.0;
    };

    for (std::size_t k = 0; k < series[0].time.size(); ++k) {
        double t = series[0].time[k];
        double mn = std::numeric_limits<double>::infinity(), mx = 0, sum = 0, lat = 0;
        for (std::size_t r = 0; r < runs.size(); ++r) {
            double v = series[r].total[k];
            mn = std::min(mn, v);
            mx = std::max(mx, v);
            sum += v;
            lat += mean_latency_at(runs[r], t);
        }
        os << fmt(t) << ',' << fmt(sum / double(runs.size())) << ',' << fmt(mn) << ','
           << fmt(mx) << ',' << fmt(lat / double(runs.size())) << '\n';
    }
}

void write_summary_json(std::ostream& os, const std::vector<RunResult>& runs,
                        const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["scenario"] = cfg.name;
    j["runs"] = runs.size();
    j["nodes"] = cfg.nodes;
    j["duration"] = cfg.duration;

    nlohmann::json arr = nlohmann::json::array();
    for (const auto& run : runs) {
        nlohmann::json r;
        r["seed"] = run.seed;
        std::uint64_t issued = 0, disseminated = 0;
        for (const auto& [id, stat] : run.txs) {
            ++issued;
            if (stat.disseminated_at >= 0.0) ++disseminated;
        }
        r["issued"] = issued;
        r["disseminated"] = disseminated;
        double t0 = std::min(30.0, cfg.duration / 2);
        r["mean_total_dr"] = mean_dr_total(run, t0, run.duration);
        r["blacklist_events"] = run.blacklist_events.size();
        r["honest_honest_blacklists"] = run.honest_honest_blacklists;
        r["last_blacklist_time"] = last_blacklist_time(run);
        r["consistency_checked"] = run.consistency.checked;
        r["consistency_violations"] = run.consistency.violations;
        r["invariant_failures"] = run.invariant_failures;
        arr.push_back(r);
    }
    j["per_run"] = arr;
    os << j.dump(2) << '\n';
}

void write_plot_scripts(const std::string& dir) {
    {
        std::ofstream gp(dir + "/dr.gp");
        gp << "# gnuplot script: total dissemination rate over time\n"
              "set datafile separator ','\n"
              "set key off\n"
              "set xlabel 'time (s)'\n"
              "set ylabel 'dissemination rate (tx/s)'\n"
              "set term pngcairo size 900,540\n"
              "set output 'dr_total.png'\n"
              "plot 'aggregate.csv' using 1:2 with lines lw 2 title 'mean DR', \\\n"
              "     '' using 1:3 with lines dt 2 title 'min', \\\n"
              "     '' using 1:4 with lines dt 2 title 'max'\n";
    }
    {
        std::ofstream gp(dir + "/dr_per_node.gp");
        gp << "# per-node scaled dissemination rate, run 0\n"
              "set datafile separator ','\n"
              "set xlabel 'time (s)'\n"
              "set ylabel 'scaled DR (tx/s per weight)'\n"
              "set term pngcairo size 900,540\n"
              "set output 'dr_per_node.png'\n"
              "plot for [n=0:49] '< awk -F, -v n='.n.' \"$1==0 && $3==n\" dr.csv' "
              "using 2:5 with lines notitle\n";
    }
    {
        std::ofstream gp(dir + "/latency_cdf.gp");
        gp << "# empirical latency CDF across all runs (finite latencies)\n"
              "set datafile separator ','\n"
              "set xlabel 'latency (s)'\n"
              "set ylabel 'CDF'\n"
              "set term pngcairo size 900,540\n"
              "set output 'latency_cdf.png'\n"
              "plot '< grep -v inf latency.csv | tail -n +2 | sort -t, -k4 -g | "
              "awk -F, \"{print \\$4, NR}\"' using 1:2 with lines notitle\n";
    }
    {
        std::ofstream gp(dir + "/blacklist.gp");
        gp << "# honest blacklist coverage of attackers over time\n"
              "set datafile separator ','\n"
              "set xlabel 'time (s)'\n"
              "set ylabel 'fraction of honest nodes'\n"
              "set yrange [0:1.05]\n"
              "set term pngcairo size 900,540\n"
              "set output 'blacklist.png'\n"
              "plot 'blacklist.csv' every ::1 using 2:3 with lines title 'honest-normalized', \\\n"
              "     '' every ::1 using 2:4 with lines title 'all-normalized'\n";
    }
    {
        std::ofstream gp(dir + "/inbox.gp");
        gp << "# reputation-scaled inbox occupancy samples, run 0\n"
              "set datafile separator ','\n"
              "set xlabel 'time (s)'\n"
              "set ylabel 'scaled queue length'\n"
              "set term pngcairo size 900,540\n"
              "set output 'inbox.png'\n"
              "plot '< awk -F, \"$1==0\" inbox.csv' using 2:5 with points pt 7 ps 0.3 notitle\n";
    }
}

}  // namespace dagsim
