#pragma once

#include "dagsim/params.hpp"
#include "dagsim/reputation.hpp"
#include "dagsim/rng.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

/// AIMD issue-rate state for a best-effort node.
struct RateState {
    double lambda = 0.0;        // current issue rate, tx/s
    double paused_until = 0.0;  // no issuing and no rate updates before this
};

/// Fair (content) rate of node m: nu * rep_m / sum(rep).
inline double content_rate(const ReputationTable& reps, NodeId m, double nu) {
    return reps.fair_rate(m, nu);
}

/// One improved-AIMD update, run each time the node issues a transaction.
///
/// When no blacklisting happened recently (horizon is infinite or beyond
/// epsilon) this is plain AIMD against the node's own reputation-scaled
/// queue: multiplicative decrease plus a tau pause on congestion, additive
/// increase of A * rep_share * |tx| otherwise. Within epsilon seconds of a
/// local blacklisting event the rate is pinned to sigma times the fair rate
/// instead, so the sudden traffic drop is not mistaken for spare bandwidth.
inline void rate_update(RateState& st, double now, double own_scaled_queue,
                        double blacklist_horizon, double rep_share,
                        double fair_rate, const ProtocolParams& p) {
    if (now < st.paused_until) return;
    if (blacklist_horizon > p.epsilon) {  // covers the "never blacklisted" +inf case
        if (own_scaled_queue > p.W) {
            st.lambda *= p.beta;
            st.paused_until = now + p.tau;
        } else {
            st.lambda += p.A * rep_share * p.tx_work;
        }
    } else {
        st.lambda = p.sigma * fair_rate;
    }
}

/// Next issue time: a fresh exponential gap after any active pause.
/// Returns +inf when the rate is zero (no event scheduled).
inline double sample_next_issue(const RateState& st, Rng& rng, double now) {
    if (st.lambda <= 0.0) return std::numeric_limits<double>::infinity();
    double start = now < st.paused_until ? st.paused_until : now;
    return start + rng.exponential(st.lambda);
}

}  // namespace dagsim
