#pragma once

#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <vector>

#include "dagsim/ledger.hpp"
#include "dagsim/params.hpp"
#include "dagsim/reputation.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

enum class FilterVerdict { Accept, Duplicate, TooOld, FromBlacklisted };

enum class EnqueueOutcome { Queued, TriggeredBlacklist };

enum class DropReason { Buffer, BlacklistTrigger, Expired };

/// A queued transaction together with the neighbour it arrived from
/// (the node's own id for self-issued traffic), kept for gossip echo
/// suppression at schedule time.
struct QueuedTx {
    Transaction tx;
    NodeId received_from = 0;
};

/// Local blacklist. Strictly grows over a run; t_bl records when each
/// issuer was blacklisted and last_event the most recent such time.
struct BlacklistState {
    std::set<NodeId> blacklisted;
    std::map<NodeId, double> t_bl;
    double last_event = 0.0;  // 0 = no blacklisting observed yet

    bool contains(NodeId i) const { return blacklisted.contains(i); }

    void add(NodeId i, double now) {
        blacklisted.insert(i);
        t_bl[i] = now;
        last_event = now;
    }
};

/// Time since the most recent local blacklisting event; +inf when none.
inline double horizon_latest(const BlacklistState& bl, double now) {
    if (bl.last_event <= 0.0) return std::numeric_limits<double>::infinity();
    return now - bl.last_event;
}

/// Time since a specific issuer was blacklisted here; +inf when never.
inline double horizon_for(const BlacklistState& bl, NodeId issuer, double now) {
    auto it = bl.t_bl.find(issuer);
    if (it == bl.t_bl.end() || it->second <= 0.0)
        return std::numeric_limits<double>::infinity();
    return now - it->second;
}

/// Per-issuer queues ordered by timestamp (ties by id), plus the deficit
/// counters the scheduler maintains for each flow.
class Inbox {
public:
    struct Flow {
        std::deque<QueuedTx> queue;
        double work = 0.0;
        double deficit = 0.0;
    };

    explicit Inbox(bool timestamp_order = true) : timestamp_order_(timestamp_order) {}

    /// Inserts at the timestamp-sorted position (or appends in FIFO mode).
    /// New issuers are appended to the issuer ring.
    void insert(QueuedTx qtx);

    /// Removes and returns the head (earliest) transaction of a flow.
    QueuedTx pop_front(NodeId issuer);
    /// Removes and returns the tail (newest) transaction of a flow.
    QueuedTx pop_back(NodeId issuer);
    /// Removes a specific queued transaction; nullopt when absent.
    std::optional<QueuedTx> remove(const TransactionId& id);

    const QueuedTx* front(NodeId issuer) const;
    bool contains(const TransactionId& id) const { return ids_.contains(id); }

    double work_of(NodeId issuer) const;
    double total_work() const { return total_work_; }
    std::size_t size() const { return ids_.size(); }

    /// Reputation-scaled queue length for one issuer: queued work / rep.
    double scaled_len(NodeId issuer, double rep) const;

    Flow& flow(NodeId issuer) { return flows_.at(issuer); }
    const Flow* find_flow(NodeId issuer) const;
    std::map<NodeId, Flow>& flows() { return flows_; }
    const std::map<NodeId, Flow>& flows() const { return flows_; }

    /// Issuers in first-seen order; the scheduler's round-robin ring.
    const std::vector<NodeId>& ring() const { return ring_; }

    bool timestamp_order() const { return timestamp_order_; }

private:
    std::map<NodeId, Flow> flows_;
    std::vector<NodeId> ring_;
    std::unordered_set<TransactionId> ids_;
    double total_work_ = 0.0;
    bool timestamp_order_ = true;
};

/// Arrival filter: duplicates (ledger, inbox or scheduled history), stale
/// timestamps, then blacklisted issuers.
FilterVerdict filter_incoming(const Ledger& ledger, const Inbox& inbox,
                              const std::unordered_set<TransactionId>& scheduled,
                              const BlacklistState& bl, const Transaction& tx,
                              double now, double max_age);

struct EnqueueResult {
    EnqueueOutcome outcome = EnqueueOutcome::Queued;
    /// Transactions removed by the buffer drop policy, drop reason Buffer,
    /// plus the triggering arrival itself on TriggeredBlacklist.
    std::vector<std::pair<Transaction, DropReason>> dropped;
};

/// Ingress for a transaction from another node (filter already passed).
/// Inserts, runs the blacklist check for the issuer, then enforces the
/// buffer capacity. The arrival that pushes the issuer's scaled queue
/// length over W_BL is itself dropped; earlier queued traffic stays.
EnqueueResult enqueue_incoming(Inbox& inbox, BlacklistState& bl, QueuedTx qtx,
                               double now, const ReputationTable& reps,
                               const ProtocolParams& params);

/// Ingress for the node's own freshly issued transaction. Self traffic
/// competes in the DRR like any other flow but never triggers the
/// blacklist check.
EnqueueResult enqueue_own(Inbox& inbox, QueuedTx qtx, const ReputationTable& reps,
                          const ProtocolParams& params);

/// Removes newest-first from the issuer with the largest scaled queue
/// length until total work fits the capacity.
std::vector<Transaction> drop_policy(Inbox& inbox, const ReputationTable& reps,
                                     double capacity);

}  // namespace dagsim
