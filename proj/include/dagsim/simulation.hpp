#pragma once

#include <cstdint>
#include <vector>

#include "dagsim/events.hpp"
#include "dagsim/metrics.hpp"
#include "dagsim/node.hpp"
#include "dagsim/reputation.hpp"
#include "dagsim/scenario.hpp"
#include "dagsim/topology.hpp"

namespace dagsim {

/// One discrete-event simulation instance. The produced metrics log is a
/// pure function of (scenario, seed): identical inputs give bit-identical
/// results. Instances are independent; callers may run several in parallel.
class Simulation {
public:
    Simulation(ScenarioConfig cfg, std::uint64_t seed);

    RunResult run();

    const ScenarioConfig& config() const { return cfg_; }
    const Topology& topology() const { return topo_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    const ReputationTable& reputations() const { return reps_; }

private:
    struct Action {
        enum Kind { RepChange, ChurnOff, ChurnOn } kind;
        std::size_t index;  // into cfg_.reputation_changes / cfg_.churn
    };

    void seed_initial_events();
    void arm_issue(Node& node, int slot);
    double issue_rate(const Node& node, int slot) const;

    void handle_scheduler_tick(Node& node);
    void handle_issue(Node& node, const Event& ev);
    void handle_deliver(const Event& ev);
    void handle_retry(Node& node);
    void handle_repeer_check(Node& node);
    void handle_sample();
    void handle_action(const Event& ev);

    void honest_issue(Node& node);
    void malicious_issue(Node& node, int slot);
    void deliver_tx(Node& node, const Transaction& tx, NodeId from);
    void attach_via_solidification(Node& node, Transaction tx);
    void request_missing_parents(Node& node, const Transaction& tx);

    void gossip(Node& node, const Transaction& tx, NodeId received_from);
    void send(NodeId from, NodeId to, Message msg);
    void send_request(Node& node, const TransactionId& missing);

    void finalize(RunResult& out);

    ScenarioConfig cfg_;
    std::uint64_t seed_ = 0;
    ReputationTable reps_;
    Topology topo_;
    std::vector<Node> nodes_;
    EventQueue queue_;
    MetricsRecorder metrics_;
    Rng delay_rng_;
    double now_ = 0.0;
    double tick_interval_ = 0.0;
    double tick_budget_ = 0.0;
    std::vector<Action> actions_;
    std::uint64_t gate_violations_ = 0;
};

}  // namespace dagsim
