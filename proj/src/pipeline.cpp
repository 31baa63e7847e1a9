#include "dagsim/pipeline.hpp"

#include <algorithm>
#include <cassert>

namespace dagsim {

void Inbox::insert(QueuedTx qtx) {
    NodeId issuer = qtx.tx.id.issuer;
    auto [it, fresh] = flows_.try_emplace(issuer);
    if (fresh) ring_.push_back(issuer);
    Flow& flow = it->second;

    ids_.insert(qtx.tx.id);
    flow.work += qtx.tx.work;
    total_work_ += qtx.tx.work;

    if (!timestamp_order_) {
        flow.queue.push_back(std::move(qtx));
        return;
    }
    auto pos = std::upper_bound(
        flow.queue.begin(), flow.queue.end(), qtx,
        [](const QueuedTx& a, const QueuedTx& b) {
            if (a.tx.timestamp != b.tx.timestamp) return a.tx.timestamp < b.tx.timestamp;
            return a.tx.id < b.tx.id;
        });
    flow.queue.insert(pos, std::move(qtx));
}

QueuedTx Inbox::pop_front(NodeId issuer) {
    Flow& flow = flows_.at(issuer);
    assert(!flow.queue.empty());
    QueuedTx qtx = std::move(flow.queue.front());
    flow.queue.pop_front();
    flow.work -= qtx.tx.work;
    total_work_ -= qtx.tx.work;
    ids_.erase(qtx.tx.id);
    return qtx;
}

QueuedTx Inbox::pop_back(NodeId issuer) {
    Flow& flow = flows_.at(issuer);
    assert(!flow.queue.empty());
    QueuedTx qtx = std::move(flow.queue.back());
    flow.queue.pop_back();
    flow.work -= qtx.tx.work;
    total_work_ -= qtx.tx.work;
    ids_.erase(qtx.tx.id);
    return qtx;
}

std::optional<QueuedTx> Inbox::remove(const TransactionId& id) {
    if (!ids_.contains(id)) return std::nullopt;
    Flow& flow = flows_.at(id.issuer);
    auto it = std::find_if(flow.queue.begin(), flow.queue.end(),
                           [&](const QueuedTx& q) { return q.tx.id == id; });
    assert(it != flow.queue.end());
    QueuedTx qtx = std::move(*it);
    flow.queue.erase(it);
    flow.work -= qtx.tx.work;
    total_work_ -= qtx.tx.work;
    ids_.erase(id);
    return qtx;
}

const QueuedTx* Inbox::front(NodeId issuer) const {
    auto it = flows_.find(issuer);
    if (it == flows_.end() || it->second.queue.empty()) return nullptr;
    return &it->second.queue.front();
}

double Inbox::work_of(NodeId issuer) const {
    auto it = flows_.find(issuer);
    return it == flows_.end() ? 0.0 : it->second.work;
}

const Inbox::Flow* Inbox::find_flow(NodeId issuer) const {
    auto it = flows_.find(issuer);
    return it == flows_.end() ? nullptr : &it->second;
}

double Inbox::scaled_len(NodeId issuer, double rep) const {
    if (rep <= 0.0) throw ConfigError("scaled_len: reputation must be positive");
    return work_of(issuer) / rep;
}

FilterVerdict filter_incoming(const Ledger& ledger, const Inbox& inbox,
                              const std::unordered_set<TransactionId>& scheduled,
                              const BlacklistState& bl, const Transaction& tx,
                              double now, double max_age) {
    if (ledger.contains(tx.id) || inbox.contains(tx.id) || scheduled.contains(tx.id))
        return FilterVerdict::Duplicate;
    if (now - tx.timestamp > max_age) return FilterVerdict::TooOld;
    if (bl.contains(tx.id.issuer)) {
        // Only traffic issued after the blacklisting event is rejected.
        // Transactions issued before it are still being scheduled by nodes
        // that blacklisted later (or not at all); accepting these stragglers
        // keeps the network's shared prefix of the flow consistent.
        auto it = bl.t_bl.find(tx.id.issuer);
        if (it != bl.t_bl.end() && tx.timestamp > it->second)
            return FilterVerdict::FromBlacklisted;
    }
    return FilterVerdict::Accept;
}

EnqueueResult enqueue_incoming(Inbox& inbox, BlacklistState& bl, QueuedTx qtx,
                               double now, const ReputationTable& reps,
                               const ProtocolParams& params) {
    EnqueueResult res;
    NodeId issuer = qtx.tx.id.issuer;
    TransactionId id = qtx.tx.id;
    inbox.insert(std::move(qtx));

    if (!bl.contains(issuer) && inbox.scaled_len(issuer, reps.rep(issuer)) > params.W_BL) {
        // The crossing arrival is dropped; traffic already queued stays and
        // will be scheduled as normal.
        bl.add(issuer, now);
        auto removed = inbox.remove(id);
        assert(removed.has_value());
        res.dropped.emplace_back(std::move(removed->tx), DropReason::BlacklistTrigger);
        res.outcome = EnqueueOutcome::TriggeredBlacklist;
    }
    for (auto& tx : drop_policy(inbox, reps, params.inbox_capacity))
        res.dropped.emplace_back(std::move(tx), DropReason::Buffer);
    return res;
}

EnqueueResult enqueue_own(Inbox& inbox, QueuedTx qtx, const ReputationTable& reps,
                          const ProtocolParams& params) {
    EnqueueResult res;
    inbox.insert(std::move(qtx));
    for (auto& tx : drop_policy(inbox, reps, params.inbox_capacity))
        res.dropped.emplace_back(std::move(tx), DropReason::Buffer);
    return res;
}

std::vector<Transaction> drop_policy(Inbox& inbox, const ReputationTable& reps,
                                     double capacity) {
    std::vector<Transaction> dropped;
    while (inbox.total_work() > capacity) {
        NodeId victim = 0;
        double worst = -1.0;
        for (const auto& [issuer, flow] : inbox.flows()) {
            if (flow.queue.empty()) continue;
            double scaled = flow.work / reps.rep(issuer);
            if (scaled > worst) {
                worst = scaled;
                victim = issuer;
            }
        }
        if (worst < 0.0) break;  // nothing left to drop
        dropped.push_back(inbox.pop_back(victim).tx);
    }
    return dropped;
}

}  // namespace dagsim
