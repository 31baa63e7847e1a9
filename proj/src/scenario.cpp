#include "dagsim/scenario.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace dagsim {

using nlohmann::json;

RoleKind ScenarioConfig::role_of(NodeId i) const {
    if (is_malicious(i)) return RoleKind::Malicious;
    if (std::find(content_nodes.begin(), content_nodes.end(), i) != content_nodes.end())
        return RoleKind::Content;
    if (std::find(inactive_nodes.begin(), inactive_nodes.end(), i) != inactive_nodes.end())
        return RoleKind::Inactive;
    return RoleKind::BestEffort;
}

bool ScenarioConfig::is_malicious(NodeId i) const { return attacker(i) != nullptr; }

const AttackerSpec* ScenarioConfig::attacker(NodeId i) const {
    for (const auto& a : attackers)
        if (a.node == i) return &a;
    return nullptr;
}

void ScenarioConfig::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };

    if (nodes < 2) fail("need at least 2 nodes");
    if (degree < 1 || degree >= nodes) fail("degree must be in [1, nodes)");
    if ((nodes * degree) % 2 != 0) fail("nodes * degree must be even");
    if (duration <= 0) fail("duration must be positive");
    if (runs < 1) fail("runs must be >= 1");

    const auto& p = params;
    if (p.nu <= 0) fail("scheduling_rate must be positive");
    if (p.dc_max <= 0) fail("dc_max must be positive");
    if (p.A <= 0) fail("additive_increase must be positive");
    if (p.beta <= 0 || p.beta >= 1) fail("multiplicative_decrease must be in (0,1)");
    if (p.tau <= 0) fail("backoff_pause must be positive");
    if (p.sigma <= 0) fail("sigma must be positive");
    if (p.epsilon < 0) fail("epsilon must be nonnegative");
    if (p.W <= 0) fail("backoff_threshold must be positive");
    if (p.W_BL <= 0) fail("blacklist_threshold must be positive");
    if (p.inbox_capacity <= 0) fail("inbox_capacity must be positive");
    if (p.tx_work <= 0) fail("tx_work must be positive");
    if (p.parents < 1 || p.parents > 8) fail("parents must be in 1..8");
    if (p.max_age <= 0) fail("max_age must be positive");
    if (p.retry_interval <= 0) fail("retry_interval must be positive");
    if (p.solidification_batch < 1) fail("solidification_batch must be >= 1");

    if (!reputation_weights.empty()) {
        if (int(reputation_weights.size()) != nodes)
            fail("reputation_weights must have one entry per node");
        for (double w : reputation_weights)
            if (!(w > 0)) fail("reputation weights must be positive");
    }
    if (zipf_exponent <= 0) fail("zipf_exponent must be positive");
    if (content_fraction <= 0 || content_fraction > 1)
        fail("content_fraction must be in (0,1]");

    auto check_node = [&](NodeId i, const char* what) {
        if (i >= NodeId(nodes)) fail(std::string(what) + ": node id out of range");
    };
    std::set<NodeId> content_set(content_nodes.begin(), content_nodes.end());
    std::set<NodeId> inactive_set(inactive_nodes.begin(), inactive_nodes.end());
    for (NodeId i : content_nodes) check_node(i, "content_nodes");
    for (NodeId i : inactive_nodes) {
        check_node(i, "inactive_nodes");
        if (content_set.contains(i)) fail("node listed as both content and inactive");
    }

    std::set<NodeId> attacker_set;
    for (const auto& a : attackers) {
        check_node(a.node, "attackers");
        if (!attacker_set.insert(a.node).second) fail("duplicate attacker node");
        if (content_set.contains(a.node) || inactive_set.contains(a.node))
            fail("attacker node also listed in a role list");
        if (a.strategy.spam_factor < 1.0) fail("spam_factor must be >= 1");
        if (a.strategy.spam_factor <= 1.0 && !a.strategy.multi_rate)
            fail("attacker must spam (factor > 1) or be multi-rate");
    }

    if (delay.min < 0 || delay.max <= delay.min) fail("delay range invalid");
    if (delay.model == DelayModel::TruncatedExp) {
        if (delay.mean <= 0) fail("delay_mean must be positive");
    } else if (delay.mean <= delay.min) {
        fail("shifted delay needs mean > min");
    }

    for (const auto& c : reputation_changes) {
        check_node(c.node, "reputation_changes");
        if (c.time < 0 || c.time > duration) fail("reputation change outside run");
        if (c.scale.has_value() == c.weight.has_value())
            fail("reputation change needs exactly one of scale / weight");
        if (c.scale && *c.scale <= 0) fail("reputation scale must be positive");
        if (c.weight && *c.weight <= 0) fail("reputation weight must be positive");
    }
    for (const auto& c : churn) {
        if (c.offline < 0 || c.online <= c.offline) fail("churn window invalid");
        for (NodeId i : c.nodes) {
            check_node(i, "churn");
            if (attacker_set.contains(i)) fail("churn applies to honest nodes only");
        }
    }
    if (rate_window <= 0 || sample_period <= 0 || settle_margin < 0)
        fail("metrics windows must be positive");
    if (total_reputation < 0) fail("total_reputation must be nonnegative");
}

namespace {

std::vector<NodeId> parse_nodes(const json& j, const char* key) {
    std::vector<NodeId> out;
    for (const auto& v : j) {
        long long x = v.get<long long>();
        if (x < 0) throw ConfigError(std::string("scenario: ") + key + ": negative node id");
        out.push_back(NodeId(x));
    }
    return out;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : j.items())
        if (!known.contains(key))
            throw ConfigError("scenario: unknown key '" + key + "' in " + where);
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: JSON parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("scenario: top level must be an object");

    static const std::set<std::string> known = {
        "name", "nodes", "degree", "duration", "runs",
        "scheduling_rate", "dc_max", "additive_increase", "multiplicative_decrease",
        "backoff_pause", "sigma", "epsilon", "backoff_threshold", "blacklist_threshold",
        "inbox_capacity", "tx_work", "parents", "max_age", "retry_interval",
        "solidification_batch",
        "disable_solidification", "disable_timestamp_order",
        "zipf_exponent", "total_reputation", "reputation_weights",
        "content_nodes", "inactive_nodes", "content_fraction",
        "attackers", "reputation_changes", "churn",
        "delay_model", "delay_min", "delay_max", "delay_mean",
        "attacker_answers_solidification", "rate_window", "sample_period",
        "settle_margin", "log_arrivals"};
    reject_unknown(j, known, "scenario");

    ScenarioConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("name", cfg.name);
    get("nodes", cfg.nodes);
    get("degree", cfg.degree);
    get("duration", cfg.duration);
    get("runs", cfg.runs);
    get("scheduling_rate", cfg.params.nu);
    get("dc_max", cfg.params.dc_max);
    get("additive_increase", cfg.params.A);
    get("multiplicative_decrease", cfg.params.beta);
    get("backoff_pause", cfg.params.tau);
    get("sigma", cfg.params.sigma);
    get("epsilon", cfg.params.epsilon);
    get("backoff_threshold", cfg.params.W);
    get("blacklist_threshold", cfg.params.W_BL);
    get("inbox_capacity", cfg.params.inbox_capacity);
    get("tx_work", cfg.params.tx_work);
    get("parents", cfg.params.parents);
    get("max_age", cfg.params.max_age);
    get("retry_interval", cfg.params.retry_interval);
    get("solidification_batch", cfg.params.solidification_batch);
    get("disable_solidification", cfg.params.disable_solidification);
    get("disable_timestamp_order", cfg.params.disable_timestamp_order);
    get("zipf_exponent", cfg.zipf_exponent);
    get("total_reputation", cfg.total_reputation);
    get("content_fraction", cfg.content_fraction);
    get("attacker_answers_solidification", cfg.attacker_answers_solidification);
    get("rate_window", cfg.rate_window);
    get("sample_period", cfg.sample_period);
    get("settle_margin", cfg.settle_margin);
    get("log_arrivals", cfg.log_arrivals);
    get("delay_min", cfg.delay.min);
    get("delay_max", cfg.delay.max);
    get("delay_mean", cfg.delay.mean);

    if (j.contains("reputation_weights"))
        cfg.reputation_weights = j.at("reputation_weights").get<std::vector<double>>();
    if (j.contains("content_nodes"))
        cfg.content_nodes = parse_nodes(j.at("content_nodes"), "content_nodes");
    if (j.contains("inactive_nodes"))
        cfg.inactive_nodes = parse_nodes(j.at("inactive_nodes"), "inactive_nodes");

    if (j.contains("delay_model")) {
        std::string m = j.at("delay_model").get<std::string>();
        if (m == "truncated-exp")
            cfg.delay.model = DelayModel::TruncatedExp;
        else if (m == "shifted-exp")
            cfg.delay.model = DelayModel::ShiftedExp;
        else
            throw ConfigError("scenario: unknown delay_model '" + m + "'");
    }

    if (j.contains("attackers")) {
        static const std::set<std::string> akeys = {"node", "spam_factor", "multi_rate",
                                                    "repeer"};
        for (const auto& a : j.at("attackers")) {
            reject_unknown(a, akeys, "attackers");
            AttackerSpec spec;
            spec.node = a.at("node").get<NodeId>();
            if (a.contains("spam_factor"))
                spec.strategy.spam_factor = a.at("spam_factor").get<double>();
            if (a.contains("multi_rate"))
                spec.strategy.multi_rate = a.at("multi_rate").get<bool>();
            if (a.contains("repeer")) spec.strategy.repeering = a.at("repeer").get<bool>();
            cfg.attackers.push_back(spec);
        }
    }
    if (j.contains("reputation_changes")) {
        static const std::set<std::string> ckeys = {"time", "node", "scale", "weight"};
        for (const auto& c : j.at("reputation_changes")) {
            reject_unknown(c, ckeys, "reputation_changes");
            ReputationChange rc;
            rc.time = c.at("time").get<double>();
            rc.node = c.at("node").get<NodeId>();
            if (c.contains("scale")) rc.scale = c.at("scale").get<double>();
            if (c.contains("weight")) rc.weight = c.at("weight").get<double>();
            cfg.reputation_changes.push_back(rc);
        }
    }
    if (j.contains("churn")) {
        static const std::set<std::string> ckeys = {"offline", "online", "nodes"};
        for (const auto& c : j.at("churn")) {
            reject_unknown(c, ckeys, "churn");
            ChurnEvent ce;
            ce.offline = c.at("offline").get<double>();
            ce.online = c.at("online").get<double>();
            ce.nodes = parse_nodes(c.at("nodes"), "churn.nodes");
            cfg.churn.push_back(ce);
        }
    }

    cfg.validate();
    return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["nodes"] = cfg.nodes;
    j["degree"] = cfg.degree;
    j["duration"] = cfg.duration;
    j["runs"] = cfg.runs;
    j["scheduling_rate"] = cfg.params.nu;
    j["dc_max"] = cfg.params.dc_max;
    j["additive_increase"] = cfg.params.A;
    j["multiplicative_decrease"] = cfg.params.beta;
    j["backoff_pause"] = cfg.params.tau;
    j["sigma"] = cfg.params.sigma;
    j["epsilon"] = cfg.params.epsilon;
    j["backoff_threshold"] = cfg.params.W;
    j["blacklist_threshold"] = cfg.params.W_BL;
    j["inbox_capacity"] = cfg.params.inbox_capacity;
    j["tx_work"] = cfg.params.tx_work;
    j["parents"] = cfg.params.parents;
    j["max_age"] = cfg.params.max_age;
    j["retry_interval"] = cfg.params.retry_interval;
    j["solidification_batch"] = cfg.params.solidification_batch;
    j["disable_solidification"] = cfg.params.disable_solidification;
    j["disable_timestamp_order"] = cfg.params.disable_timestamp_order;
    j["zipf_exponent"] = cfg.zipf_exponent;
    j["total_reputation"] = cfg.total_reputation;
    if (!cfg.reputation_weights.empty()) j["reputation_weights"] = cfg.reputation_weights;
    j["content_nodes"] = cfg.content_nodes;
    j["inactive_nodes"] = cfg.inactive_nodes;
    j["content_fraction"] = cfg.content_fraction;
    j["delay_model"] =
        cfg.delay.model == DelayModel::TruncatedExp ? "truncated-exp" : "shifted-exp";
    j["delay_min"] = cfg.delay.min;
    j["delay_max"] = cfg.delay.max;
    j["delay_mean"] = cfg.delay.mean;
    j["attacker_answers_solidification"] = cfg.attacker_answers_solidification;
    j["rate_window"] = cfg.rate_window;
    j["sample_period"] = cfg.sample_period;
    j["settle_margin"] = cfg.settle_margin;
    j["log_arrivals"] = cfg.log_arrivals;
    j["attackers"] = json::array();
    for (const auto& a : cfg.attackers)
        j["attackers"].push_back({{"node", a.node},
                                  {"spam_factor", a.strategy.spam_factor},
                                  {"multi_rate", a.strategy.multi_rate},
                                  {"repeer", a.strategy.repeering}});
    j["reputation_changes"] = json::array();
    for (const auto& c : cfg.reputation_changes) {
        json e{{"time", c.time}, {"node", c.node}};
        if (c.scale) e["scale"] = *c.scale;
        if (c.weight) e["weight"] = *c.weight;
        j["reputation_changes"].push_back(e);
    }
    j["churn"] = json::array();
    for (const auto& c : cfg.churn)
        j["churn"].push_back({{"offline", c.offline}, {"online", c.online}, {"nodes", c.nodes}});
    return j.dump(2);
}

namespace {

// Default role split: the five lowest-reputation nodes are inactive, every
// third rank starting at rank 4 is content, the rest are best-effort.
void default_roles(ScenarioConfig& cfg) {
    cfg.content_nodes.clear();
    cfg.inactive_nodes.clear();
    for (int i = 3; i < cfg.nodes - 5; i += 3) cfg.content_nodes.push_back(NodeId(i));
    for (int i = cfg.nodes - 5; i < cfg.nodes; ++i) cfg.inactive_nodes.push_back(NodeId(i));
}

void strip_role(ScenarioConfig& cfg, NodeId node) {
    std::erase(cfg.content_nodes, node);
    std::erase(cfg.inactive_nodes, node);
}

ScenarioConfig base_scenario(const std::string& name) {
    ScenarioConfig cfg;
    cfg.name = name;
    default_roles(cfg);
    return cfg;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
    return {"honest-baseline",    "spam-no-repeer",     "spam-repeer",
            "multi-rate",         "multi-rate-repeer",  "coalition-spam",
            "coalition-multi-rate", "rep-change-70",    "rep-change-40",
            "rep-change-80",      "churn",              "ablation-no-solidification",
            "ablation-no-timestamp"};
}

ScenarioConfig builtin_scenario(const std::string& name) {
    ScenarioConfig cfg = base_scenario(name);

    auto add_attacker = [&](NodeId node, double spam, bool multi, bool repeer) {
        strip_role(cfg, node);
        cfg.attackers.push_back({node, {spam, multi, repeer}});
    };
    auto rep_change_pair = [&](double scale) {
        // rank-3 best-effort node and rank-4 content node lose reputation at 75 s
        cfg.duration = 200.0;
        cfg.reputation_changes.push_back({75.0, 2, scale, std::nullopt});
        cfg.reputation_changes.push_back({75.0, 3, scale, std::nullopt});
    };

    if (name == "honest-baseline") {
        cfg.duration = 300.0;
    } else if (name == "spam-no-repeer") {
        cfg.duration = 120.0;
        add_attacker(4, 10.0, false, false);
    } else if (name == "spam-repeer") {
        cfg.duration = 200.0;
        add_attacker(4, 10.0, false, true);
    } else if (name == "multi-rate") {
        cfg.duration = 200.0;
        add_attacker(4, 1.0, true, false);
    } else if (name == "multi-rate-repeer") {
        cfg.duration = 240.0;
        add_attacker(4, 1.0, true, true);
    } else if (name == "coalition-spam") {
        cfg.duration = 180.0;
        for (NodeId node : {1u, 3u, 5u, 7u, 9u}) add_attacker(node, 10.0, false, false);
    } else if (name == "coalition-multi-rate") {
        cfg.duration = 240.0;
        for (NodeId node : {1u, 3u, 5u, 7u, 9u}) add_attacker(node, 1.0, true, false);
    } else if (name == "rep-change-70") {
        rep_change_pair(0.3);
    } else if (name == "rep-change-40") {
        rep_change_pair(0.6);
    } else if (name == "rep-change-80") {
        rep_change_pair(0.2);
    } else if (name == "churn") {
        // every node active so post-churn scaled rates share one fixed point
        cfg.duration = 300.0;
        cfg.content_nodes.clear();
        cfg.inactive_nodes.clear();
        for (int i = 3; i < cfg.nodes; i += 3) cfg.content_nodes.push_back(NodeId(i));
        cfg.churn.push_back({100.0, 200.0, {5, 8, 6, 9}});
    } else if (name == "ablation-no-solidification") {
        cfg.duration = 200.0;
        add_attacker(4, 1.0, true, false);
        cfg.params.disable_solidification = true;
    } else if (name == "ablation-no-timestamp") {
        cfg.duration = 200.0;
        add_attacker(4, 1.0, true, false);
        cfg.params.disable_timestamp_order = true;
    } else {
        throw ConfigError("unknown builtin scenario '" + name + "'");
    }
    cfg.validate();
    return cfg;
}

}  // namespace dagsim
