#include "dagsim/topology.hpp"

#include <algorithm>
#include <deque>

namespace dagsim {

std::vector<NodeId> gossip_targets(const Topology& topo, NodeId node, NodeId issuer,
                                   NodeId received_from) {
    std::vector<NodeId> out;
    for (NodeId nb : topo.neighbours(node))
        if (nb != received_from && nb != issuer) out.push_back(nb);
    return out;
}

double sample_delay(Rng& rng, const DelayParams& p) {
    if (p.model == DelayModel::ShiftedExp)
        return p.min + rng.exponential(1.0 / (p.mean - p.min));
    double rate = 1.0 / p.mean;
    for (;;) {
        double d = rng.exponential(rate);
        if (d >= p.min && d <= p.max) return d;
    }
}

Topology Topology::build(int n_nodes, int degree, Rng& rng) {
    if (n_nodes <= degree) throw ConfigError("topology: need degree < nodes");
    if ((n_nodes * degree) % 2 != 0)
        throw ConfigError("topology: nodes * degree must be even");

    // A random pairing of degree-4 stubs is simple only ~2.4% of the time,
    // independent of N; the cap leaves the failure probability negligible.
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::vector<NodeId> stubs;
        stubs.reserve(std::size_t(n_nodes * degree));
        for (NodeId v = 0; v < NodeId(n_nodes); ++v)
            for (int k = 0; k < degree; ++k) stubs.push_back(v);
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.uniform_index(i)]);

        Topology topo;
        topo.adj_.assign(std::size_t(n_nodes), {});
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
            NodeId a = stubs[i], b = stubs[i + 1];
            if (a == b || topo.adj_[a].contains(b)) {
                simple = false;
                break;
            }
            topo.adj_[a].insert(b);
            topo.adj_[b].insert(a);
        }
        if (simple && topo.connected()) return topo;
    }
    throw ConfigError("topology: failed to build a connected simple graph after 1000 attempts");
}

bool Topology::connected() const {
    if (adj_.empty()) return true;
    std::vector<bool> seen(adj_.size(), false);
    std::deque<NodeId> queue{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        for (NodeId w : adj_[v]) {
            if (!seen[w]) {
                seen[w] = true;
                ++count;
                queue.push_back(w);
            }
        }
    }
    return count == adj_.size();
}

std::vector<NodeId> Topology::repeer(NodeId node, const std::vector<NodeId>& candidates,
                                     int degree, Rng& rng) {
    for (NodeId old : adj_[node]) adj_[old].erase(node);
    adj_[node].clear();

    std::vector<NodeId> pool;
    for (NodeId c : candidates)
        if (c != node) pool.push_back(c);

    std::vector<NodeId> picked;
    int want = std::min<int>(degree, int(pool.size()));
    for (int i = 0; i < want; ++i) {
        std::size_t j = std::size_t(i) + rng.uniform_index(pool.size() - std::size_t(i));
        std::swap(pool[std::size_t(i)], pool[j]);
        picked.push_back(pool[std::size_t(i)]);
    }
    for (NodeId p : picked) {
        adj_[node].insert(p);
        adj_[p].insert(node);
    }
    return picked;
}

}  // namespace dagsim
