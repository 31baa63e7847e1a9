#pragma once

#include <cmath>
#include <vector>

#include "dagsim/types.hpp"

namespace dagsim {

/// Zipf weights over ranks 1..n with exponent s, normalized to sum 1.
/// Rank r (0-indexed entry r-1) gets weight proportional to r^(-s).
std::vector<double> zipf_weights(int n, double s);

/// Global reputation table shared by every node in a simulation instance
/// (nodes are assumed to have perfect, consistent knowledge of reputation).
///
/// Two scales live here. `weight(i)` is the normalized share (sums to 1)
/// and drives every proportional quantity: fair rates, additive-increase
/// shares, scheduler quanta. `rep(i) = weight(i) * total()` is the absolute
/// reputation used wherever the protocol compares a reputation-scaled queue
/// length against an absolute threshold (W, W_BL). The absolute scale is a
/// scenario parameter; thresholds in the literature assume reputations well
/// above one for every active node.
class ReputationTable {
public:
    ReputationTable() = default;
    ReputationTable(std::vector<double> weights, double total);

    int size() const { return int(weights_.size()); }
    double weight(NodeId i) const { return weights_[i]; }
    double rep(NodeId i) const { return weights_[i] * total_; }
    double total() const { return total_; }
    double max_rep() const { return max_weight_ * total_; }

    /// Fair issue rate of node i for global writing power nu.
    double fair_rate(NodeId i, double nu) const { return nu * weights_[i]; }

    /// DRR quantum: highest-reputation node earns one work unit per rotation.
    double quantum(NodeId i) const { return weights_[i] / max_weight_; }

    /// Multiplies node i's weight by `scale`, then renormalizes all weights
    /// to sum 1 (everyone else gains proportionally).
    void rescale(NodeId i, double scale);

    /// Sets node i's weight to an absolute value, then renormalizes.
    void set_weight(NodeId i, double w);

    const std::vector<double>& weights() const { return weights_; }

private:
    void normalize();

    std::vector<double> weights_;
    double total_ = 0.0;
    double max_weight_ = 0.0;
};

}  // namespace dagsim
