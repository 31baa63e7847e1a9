#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "dagsim/simulation.hpp"

using namespace dagsim;

namespace {

ScenarioConfig attack_scenario(bool multi_rate, bool repeer, double spam_factor,
                               double duration = 30.0) {
    ScenarioConfig cfg;
    cfg.name = "attack-test";
    cfg.nodes = 16;
    cfg.degree = 4;
    cfg.duration = duration;
    cfg.runs = 1;
    cfg.content_nodes = {3, 6, 9};
    cfg.inactive_nodes = {14, 15};
    cfg.attackers.push_back({2, {spam_factor, multi_rate, repeer}});
    cfg.validate();
    return cfg;
}

}  // namespace

TEST_CASE("a non-spamming single-stream attacker is rejected by validation") {
    ScenarioConfig cfg;
    cfg.attackers.push_back({0, {1.0, false, false}});
    CHECK_THROWS_AS(cfg.validate(), ConfigError);

    // multi-rate at factor 1 is a valid strategy
    cfg.attackers[0].strategy.multi_rate = true;
    cfg.validate();
}

TEST_CASE("spammers issue near spam_factor times their fair rate") {
    ScenarioConfig cfg = attack_scenario(false, false, 10.0, 40.0);
    Simulation sim(cfg, 5);
    double fair = sim.reputations().fair_rate(2, cfg.params.nu);
    RunResult run = sim.run();

    double issued = double(run.counters[2].issued);
    double expected = 10.0 * fair * cfg.duration;
    // Poisson count: 4 sigma of slack
    CHECK(std::abs(issued - expected) <= 4.0 * std::sqrt(expected));
}

TEST_CASE("spammers get blacklisted by their neighbours; honest nodes never do") {
    ScenarioConfig cfg = attack_scenario(false, false, 10.0, 40.0);
    Simulation sim(cfg, 5);
    auto neighbours = sim.topology().neighbours(2);
    RunResult run = sim.run();

    std::set<NodeId> observers;
    for (const auto& ev : run.blacklist_events) {
        CHECK(ev.target == 2);  // only the attacker is ever blacklisted
        observers.insert(ev.observer);
    }
    for (NodeId nb : neighbours) CHECK(observers.contains(nb));
    CHECK(run.honest_honest_blacklists == 0);
}

TEST_CASE("multi-rate streams use disjoint id spaces at the allowed per-stream rate") {
    ScenarioConfig cfg = attack_scenario(true, false, 1.0, 40.0);
    Simulation sim(cfg, 9);
    double fair = sim.reputations().fair_rate(2, cfg.params.nu);
    RunResult run = sim.run();

    std::set<std::uint64_t> slots;
    std::map<std::uint64_t, int> per_slot;
    for (const auto& [id, stat] : run.txs) {
        if (id.issuer != 2) continue;
        std::uint64_t slot = id.seq >> 40;
        slots.insert(slot);
        per_slot[slot]++;
    }
    CHECK(slots.size() == 4);  // one stream per neighbour

    // each stream individually obeys the allowed rate
    for (const auto& [slot, count] : per_slot) {
        double expected = fair * cfg.duration;
        CHECK(std::abs(double(count) - expected) <= 4.0 * std::sqrt(expected) + 2.0);
    }
}

TEST_CASE("multi-rate attackers end up blacklisted through gossip inflation") {
    ScenarioConfig cfg = attack_scenario(true, false, 1.0, 60.0);
    Simulation sim(cfg, 3);
    auto neighbours = sim.topology().neighbours(2);
    RunResult run = sim.run();

    std::set<NodeId> observers;
    for (const auto& ev : run.blacklist_events)
        if (ev.target == 2 && run.honest[ev.observer]) observers.insert(ev.observer);
    for (NodeId nb : neighbours) CHECK(observers.contains(nb));
    CHECK(run.honest_honest_blacklists == 0);
}

TEST_CASE("re-peering attackers reach observers beyond the original neighbourhood") {
    ScenarioConfig cfg = attack_scenario(false, true, 10.0, 60.0);
    Simulation sim(cfg, 13);
    auto original = sim.topology().neighbours(2);
    RunResult run = sim.run();

    std::set<NodeId> observers;
    for (const auto& ev : run.blacklist_events)
        if (ev.target == 2) observers.insert(ev.observer);
    CHECK(observers.size() > original.size());
    CHECK(run.honest_honest_blacklists == 0);

    // without re-peering only direct neighbours ever observe the spam
    ScenarioConfig fixed = attack_scenario(false, false, 10.0, 60.0);
    Simulation sim2(fixed, 13);
    auto nbs = sim2.topology().neighbours(2);
    RunResult run2 = sim2.run();
    std::set<NodeId> observers2;
    for (const auto& ev : run2.blacklist_events) observers2.insert(ev.observer);
    for (NodeId obs : observers2) CHECK(nbs.contains(obs));
}

TEST_CASE("coalition scenarios assign malicious roles in the top ranks") {
    ScenarioConfig cfg = builtin_scenario("coalition-spam");
    CHECK(cfg.attackers.size() == 5);
    for (const auto& a : cfg.attackers) {
        CHECK(a.node < 10);  // top-ten reputation ranks
        CHECK(cfg.role_of(a.node) == RoleKind::Malicious);
    }
    CHECK(cfg.honest_count() == cfg.nodes - 5);

    ScenarioConfig multi = builtin_scenario("coalition-multi-rate");
    for (const auto& a : multi.attackers) CHECK(a.strategy.multi_rate);
}

TEST_CASE("attacker transactions stop disseminating after isolation") {
    ScenarioConfig cfg = attack_scenario(false, false, 10.0, 60.0);
    RunResult run = Simulation(cfg, 21).run();

    double last_bl = last_blacklist_time(run);
    REQUIRE(last_bl >= 0.0);
    // no attacker transaction disseminates in the final stretch
    double attacker_dr_tail = mean_dr_per_node(run, cfg.nodes, cfg.duration - 10.0,
                                               cfg.duration)[2];
    CHECK(attacker_dr_tail == 0.0);
}
