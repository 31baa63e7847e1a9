#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dagsim/params.hpp"
#include "dagsim/topology.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

/// Node behaviour classes. Node ids double as reputation ranks: node 0
/// holds the highest reputation.
enum class RoleKind { Inactive, Content, BestEffort, Malicious };

struct MaliciousStrategy {
    double spam_factor = 10.0;  // multiplier over the allowed rate; > 1 spams
    bool multi_rate = false;    // one independent stream per neighbour
    bool repeering = false;     // swap all neighbours once fully blacklisted
};

struct AttackerSpec {
    NodeId node = 0;
    MaliciousStrategy strategy;
};

struct ReputationChange {
    double time = 0.0;
    NodeId node = 0;
    std::optional<double> scale;   // new_weight = old_weight * scale
    std::optional<double> weight;  // or absolute new weight
};

struct ChurnEvent {
    double offline = 0.0;
    double online = 0.0;
    std::vector<NodeId> nodes;
};

struct ScenarioConfig {
    std::string name = "custom";
    int nodes = 50;
    int degree = 4;
    double duration = 120.0;
    int runs = 10;

    ProtocolParams params;

    double zipf_exponent = 0.9;
    /// Absolute reputation assigned in total; 0 means the default 6 * nodes.
    double total_reputation = 0.0;
    /// Explicit weights (must have `nodes` entries); overrides the Zipf draw.
    std::vector<double> reputation_weights;

    std::vector<NodeId> content_nodes;
    std::vector<NodeId> inactive_nodes;
    double content_fraction = 1.0;  // content nodes issue at fraction * fair rate

    std::vector<AttackerSpec> attackers;
    std::vector<ReputationChange> reputation_changes;
    std::vector<ChurnEvent> churn;

    DelayParams delay;

    bool attacker_answers_solidification = false;
    double rate_window = 10.0;    // sliding window for rate series, seconds
    double sample_period = 1.0;   // inbox / coverage sampling period
    double settle_margin = 10.0;  // consistency check excludes the tail
    bool log_arrivals = false;    // keep the full per-node arrival log

    double total_rep() const {
        return total_reputation > 0.0 ? total_reputation : 6.0 * nodes;
    }

    RoleKind role_of(NodeId i) const;
    bool is_malicious(NodeId i) const;
    const AttackerSpec* attacker(NodeId i) const;
    int honest_count() const { return nodes - int(attackers.size()); }

    /// Throws ConfigError on any inconsistency.
    void validate() const;
};

/// Strict JSON parsing: unknown keys are rejected.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& cfg);

/// Ready-made scenarios reproducing the reference experiments.
std::vector<std::string> builtin_scenario_names();
ScenarioConfig builtin_scenario(const std::string& name);

}  // namespace dagsim
