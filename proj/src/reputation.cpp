#include "dagsim/reputation.hpp"

#include <algorithm>
#include <numeric>

namespace dagsim {

std::vector<double> zipf_weights(int n, double s) {
    if (n < 1) throw ConfigError("zipf_weights: n must be >= 1");
    if (s <= 0.0) throw ConfigError("zipf_weights: exponent must be > 0");
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int r = 1; r <= n; ++r) w[std::size_t(r - 1)] = std::pow(double(r), -s);
    double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) x /= sum;
    return w;
}

ReputationTable::ReputationTable(std::vector<double> weights, double total)
    : weights_(std::move(weights)), total_(total) {
    for (double w : weights_)
        if (!(w > 0.0)) throw ConfigError("reputation weights must be positive");
    if (!(total_ > 0.0)) throw ConfigError("total reputation must be positive");
    normalize();
}

void ReputationTable::rescale(NodeId i, double scale) {
    if (!(scale > 0.0)) throw ConfigError("reputation scale must be positive");
    weights_[i] *= scale;
    normalize();
}

void ReputationTable::set_weight(NodeId i, double w) {
    if (!(w > 0.0)) throw ConfigError("reputation weight must be positive");
    weights_[i] = w;
    normalize();
}

void ReputationTable::normalize() {
    double sum = std::accumulate(weights_.begin(), weights_.end(), 0.0);
    for (auto& x : weights_) x /= sum;
    max_weight_ = *std::max_element(weights_.begin(), weights_.end());
}

}  // namespace dagsim
