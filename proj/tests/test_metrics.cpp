#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dagsim/metrics.hpp"
#include "dagsim/montecarlo.hpp"
#include "dagsim/simulation.hpp"

using namespace dagsim;

namespace {

Transaction mk(NodeId issuer, std::uint64_t seq, double ts) {
    Transaction tx;
    tx.id = {issuer, seq};
    tx.timestamp = ts;
    return tx;
}

ScenarioConfig small_cfg(int nodes = 4) {
    ScenarioConfig cfg;
    cfg.nodes = nodes;
    cfg.degree = 2;
    cfg.duration = 60.0;
    cfg.runs = 1;
    cfg.rate_window = 10.0;
    return cfg;
}

}  // namespace

TEST_CASE("zipf weights match the direct power-law normalization") {
    CHECK(zipf_weights(1, 0.9) == std::vector<double>{1.0});

    auto w3 = zipf_weights(3, 0.9);
    double p2 = std::pow(2.0, -0.9), p3 = std::pow(3.0, -0.9);
    double norm = 1.0 + p2 + p3;
    CHECK(w3[0] == doctest::Approx(1.0 / norm));
    CHECK(w3[1] == doctest::Approx(p2 / norm));
    CHECK(w3[2] == doctest::Approx(p3 / norm));

    auto w50 = zipf_weights(50, 0.9);
    double sum = 0.0, head = 0.0;
    for (int r = 1; r <= 50; ++r) sum += std::pow(double(r), -0.9);
    head = 1.0 / sum;
    CHECK(w50[0] == doctest::Approx(head));
    CHECK(w50[0] / w50[49] == doctest::Approx(std::pow(50.0, 0.9)));
    double total = 0.0;
    for (double w : w50) total += w;
    CHECK(total == doctest::Approx(1.0));

    CHECK_THROWS_AS(zipf_weights(0, 0.9), ConfigError);
    CHECK_THROWS_AS(zipf_weights(3, 0.0), ConfigError);
}

TEST_CASE("a transaction counts as disseminated only when every honest node has it") {
    MetricsRecorder rec(4, {true, true, true, false}, false);
    Transaction tx = mk(0, 0, 1.0);
    rec.on_issue(tx, 1.0);

    rec.on_solid_arrival(tx.id, 0, 1.2);
    rec.on_solid_arrival(tx.id, 1, 1.3);
    rec.on_solid_arrival(tx.id, 3, 1.35);  // attacker arrival does not count

    RunResult partial;
    MetricsRecorder copy = rec;  // snapshot before the last honest arrival
    copy.finish(partial);
    CHECK(partial.txs.at(tx.id).disseminated_at < 0.0);

    rec.on_solid_arrival(tx.id, 2, 1.4);
    RunResult out;
    rec.finish(out);
    CHECK(out.txs.at(tx.id).disseminated_at == doctest::Approx(1.4));
    CHECK(out.txs.at(tx.id).honest_arrivals == 3);
}

TEST_CASE("latency is last-arrival minus issue; undelivered are reported apart") {
    MetricsRecorder rec(2, {true, true}, false);
    Transaction a = mk(0, 0, 1.0), b = mk(0, 1, 2.0);
    rec.on_issue(a, 1.0);
    rec.on_issue(b, 2.0);
    rec.on_solid_arrival(a.id, 0, 1.1);
    rec.on_solid_arrival(a.id, 1, 1.4);
    rec.on_solid_arrival(b.id, 0, 2.1);  // never reaches node 1

    RunResult out;
    rec.finish(out);
    out.nodes = 2;
    auto lat = latency_summary(out, 2);
    REQUIRE(lat.per_node[0].size() == 1);
    CHECK(lat.per_node[0][0] == doctest::Approx(0.4));
    CHECK(lat.undelivered[0] == 1);

    CHECK(quantile(lat.per_node[0], 0.5) == doctest::Approx(0.4));
    CHECK(std::isnan(quantile({}, 0.5)));
}

TEST_CASE("dissemination series applies the sliding window") {
    MetricsRecorder rec(2, {true, true}, false);
    for (int i = 0; i < 10; ++i) {
        Transaction tx = mk(0, std::uint64_t(i), double(i));
        rec.on_issue(tx, double(i));
        rec.on_solid_arrival(tx.id, 0, double(i) + 0.1);
        rec.on_solid_arrival(tx.id, 1, double(i) + 0.2);
    }
    RunResult out;
    rec.finish(out);
    out.duration = 20.0;

    ScenarioConfig cfg = small_cfg(2);
    cfg.duration = 20.0;
    auto series = dissemination_series(out, cfg);
    // all ten disseminations fall in (0, 10]: the window at t=10 holds them all
    std::size_t k10 = 9;  // t = 10.0 with 1 s sampling
    CHECK(series.time[k10] == doctest::Approx(10.0));
    CHECK(series.total[k10] == doctest::Approx(1.0));  // 10 tx / 10 s window
    CHECK(series.per_node[0][k10] == doctest::Approx(1.0));
    CHECK(series.per_node[1][k10] == 0.0);
    // by t = 20 the window has slid past them
    CHECK(series.total.back() == 0.0);

    CHECK(mean_dr_total(out, 0.0, 10.0) == doctest::Approx(1.0));
    CHECK(mean_dr_per_node(out, 2, 0.0, 10.0)[0] == doctest::Approx(1.0));
}

TEST_CASE("blacklist coverage uses both normalizations") {
    MetricsRecorder rec(5, {true, true, true, true, false}, false);
    rec.on_blacklist(0, 4, 5.0);
    rec.on_blacklist(1, 4, 7.0);
    RunResult out;
    rec.finish(out);
    out.duration = 10.0;

    ScenarioConfig cfg = small_cfg(5);
    cfg.duration = 10.0;
    cfg.attackers.push_back({4, {10.0, false, false}});
    auto cov = blacklist_coverage(out, 4, cfg);

    auto at = [&](double t) {
        for (const auto& p : cov)
            if (std::abs(p.time - t) < 1e-9) return p;
        return CoveragePoint{};
    };
    CHECK(at(4.0).honest_fraction == 0.0);
    CHECK(at(5.0).honest_fraction == doctest::Approx(0.25));  // 1 of 4 honest
    CHECK(at(5.0).all_fraction == doctest::Approx(0.2));      // 1 of 5 nodes
    CHECK(at(8.0).honest_fraction == doctest::Approx(0.5));
    CHECK(out.honest_honest_blacklists == 0);
}

TEST_CASE("consistency report is clean on an honest run") {
    ScenarioConfig cfg;
    cfg.nodes = 10;
    cfg.degree = 4;
    cfg.duration = 20.0;
    cfg.runs = 1;
    cfg.content_nodes = {3, 6};
    cfg.validate();
    RunResult run = Simulation(cfg, 2).run();
    CHECK(run.consistency.checked > 0);
    CHECK(run.consistency.violations == 0);
}

TEST_CASE("scenario json round-trips and rejects junk") {
    ScenarioConfig cfg = builtin_scenario("multi-rate-repeer");
    std::string text = scenario_to_json(cfg);
    ScenarioConfig back = scenario_from_json(text);
    CHECK(back.nodes == cfg.nodes);
    CHECK(back.duration == cfg.duration);
    CHECK(back.attackers.size() == cfg.attackers.size());
    CHECK(back.attackers[0].strategy.multi_rate);
    CHECK(back.attackers[0].strategy.repeering);
    CHECK(scenario_to_json(back) == text);

    CHECK_THROWS_AS(scenario_from_json("{\"nodez\": 50}"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("not json"), ConfigError);
    CHECK_THROWS_AS(scenario_from_json("{\"nodes\": 1}"), ConfigError);
    CHECK_THROWS_AS(
        scenario_from_json("{\"attackers\": [{\"node\": 0, \"spam_factor\": 1.0}]}"),
        ConfigError);
}

TEST_CASE("table defaults match the reference parameters") {
    ScenarioConfig cfg;
    CHECK(cfg.params.nu == 50.0);
    CHECK(cfg.params.dc_max == 1.0);
    CHECK(cfg.params.A == 0.06);
    CHECK(cfg.params.beta == 0.5);
    CHECK(cfg.params.tau == 2.0);
    CHECK(cfg.params.sigma == 0.6);
    CHECK(cfg.params.epsilon == 15.0);
    CHECK(cfg.params.W_BL == 5.0);
    CHECK(cfg.params.tx_work == 1.0);
    CHECK(cfg.nodes == 50);
    CHECK(cfg.degree == 4);
    CHECK(cfg.runs == 10);
}

TEST_CASE("csv writers emit fixed schemas") {
    ScenarioConfig cfg = small_cfg();
    cfg.duration = 15.0;
    cfg.content_nodes = {1};
    cfg.validate();
    std::vector<RunResult> runs;
    runs.push_back(Simulation(cfg, 3).run());

    std::ostringstream dr, lat, inbox, bl, agg;
    write_dr_csv(dr, runs, cfg);
    write_latency_csv(lat, runs, cfg);
    write_inbox_csv(inbox, runs);
    write_blacklist_csv(bl, runs, cfg);
    write_aggregate_csv(agg, runs, cfg);

    CHECK(dr.str().rfind("run,time,node,dr,scaled_dr\n", 0) == 0);
    CHECK(lat.str().rfind("run,node,tx,latency\n", 0) == 0);
    CHECK(inbox.str().rfind("run,time,observer,issuer,scaled_len\n", 0) == 0);
    CHECK(bl.str().rfind("run,time,coverage_honest,coverage_all\n", 0) == 0);
    CHECK(agg.str().rfind("time,total_dr_mean,total_dr_min,total_dr_max,mean_latency\n", 0) ==
          0);

    std::ostringstream summary;
    write_summary_json(summary, runs, cfg);
    CHECK(summary.str().find("\"per_run\"") != std::string::npos);
}

TEST_CASE("builtin scenario names resolve") {
    for (const auto& name : builtin_scenario_names()) {
        ScenarioConfig cfg = builtin_scenario(name);
        CHECK(cfg.name == name);
        CHECK(cfg.duration >= 120.0);
        CHECK(cfg.duration <= 300.0);
    }
    CHECK_THROWS_AS(builtin_scenario("nope"), ConfigError);
}
