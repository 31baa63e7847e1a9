#pragma once

#include <set>
#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

enum class DelayModel { TruncatedExp, ShiftedExp };

struct DelayParams {
    DelayModel model = DelayModel::TruncatedExp;
    double min = 0.05;   // seconds
    double max = 0.15;
    double mean = 0.10;  // pre-truncation mean for TruncatedExp
};

/// Per-message link delay. The default draws an exponential with the given
/// mean, rejected into [min, max]; the shifted variant is min + Exp with no
/// upper bound.
double sample_delay(Rng& rng, const DelayParams& p);

class Topology;

/// Neighbours that receive a transaction scheduled at `node`: everyone
/// except the peer it came from and the issuer itself. Self-issued traffic
/// (received_from == node) goes to every neighbour.
std::vector<NodeId> gossip_targets(const Topology& topo, NodeId node, NodeId issuer,
                                   NodeId received_from);

/// Undirected peering graph. Built as a random n-regular graph (pairing
/// model, retried until simple and connected). Re-peering replaces one
/// node's edges and can leave other degrees off target; symmetry always
/// holds.
class Topology {
public:
    Topology() = default;

    /// Throws ConfigError after 100 failed attempts (caller should re-seed).
    static Topology build(int n_nodes, int degree, Rng& rng);

    const std::set<NodeId>& neighbours(NodeId i) const { return adj_[i]; }
    bool adjacent(NodeId a, NodeId b) const { return adj_[a].contains(b); }
    int size() const { return int(adj_.size()); }
    int degree(NodeId i) const { return int(adj_[i].size()); }

    bool connected() const;

    /// Drops all of `node`'s edges and connects it to `degree` uniformly
    /// random members of `candidates` (non-neighbours, typically honest
    /// nodes), who accept unconditionally. Returns the new neighbour set.
    std::vector<NodeId> repeer(NodeId node, const std::vector<NodeId>& candidates,
                               int degree, Rng& rng);

private:
    std::vector<std::set<NodeId>> adj_;
};

}  // namespace dagsim
