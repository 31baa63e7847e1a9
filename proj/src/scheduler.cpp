#include "dagsim/scheduler.hpp"

#include <algorithm>

namespace dagsim {

namespace {
constexpr double kEps = 1e-9;
}

DrrScheduler::TickResult DrrScheduler::tick(Inbox& inbox, Ledger& ledger,
                                            ReqSolid& reqsolid,
                                            const ReputationTable& reps,
                                            const ProtocolParams& params,
                                            double now, double work_budget) {
    TickResult res;
    const auto& ring = inbox.ring();
    if (ring.empty()) return res;

    std::size_t visited = 0;
    double budget = work_budget;
    while (visited < ring.size() && budget > kEps) {
        if (cursor_ >= ring.size()) cursor_ = 0;
        NodeId issuer = ring[cursor_];
        Inbox::Flow& flow = inbox.flow(issuer);

        if (flow.queue.empty()) {
            flow.deficit = std::min(flow.deficit + reps.quantum(issuer), params.dc_max);
        } else {
            flow.deficit += reps.quantum(issuer);
            while (budget > kEps) {
                const QueuedTx* head = inbox.front(issuer);
                if (!head || flow.deficit + kEps < head->tx.work) break;
                double work = head->tx.work;
                HeadResult hr = try_schedule_head(issuer, inbox, ledger, reqsolid,
                                                  params, now, res);
                if (hr.outcome == HeadOutcome::Scheduled) {
                    flow.deficit -= work;
                    budget -= work;
                } else if (!hr.evicted) {
                    break;  // blocked unsolid or empty; deficit keeps building
                }
            }
        }
        ++cursor_;
        ++visited;
    }
    return res;
}

DrrScheduler::HeadResult DrrScheduler::try_schedule_head(
    NodeId issuer, Inbox& inbox, Ledger& ledger, ReqSolid& reqsolid,
    const ProtocolParams& params, double now, TickResult& out) {
    HeadResult hr;
    const QueuedTx* head = inbox.front(issuer);
    if (!head) {
        hr.outcome = HeadOutcome::Empty;
        return hr;
    }
    const Transaction& tx = head->tx;

    if (ledger.contains(tx.id)) {
        // Already in the ledger through a solidification reply. Once solid it
        // still consumes a scheduling slot (it is forwarded like any other
        // scheduled transaction); while unsolid it blocks like any other head.
        if (ledger.is_solid(tx.id) || params.disable_solidification) {
            QueuedTx qtx = inbox.pop_front(issuer);
            note_scheduled(qtx.tx.id);
            out.scheduled.push_back({std::move(qtx.tx), qtx.received_from, false});
            hr.outcome = HeadOutcome::Scheduled;
            return hr;
        }
    } else {
        bool eligible = true;
        if (!params.disable_solidification) {
            for (const auto& p : tx.parents) {
                if (!ledger.is_solid(p)) {
                    eligible = false;
                    break;
                }
            }
        }
        if (eligible) {
            QueuedTx qtx = inbox.pop_front(issuer);
            auto attach = ledger.attach(qtx.tx);
            for (auto& id : attach.newly_solid) out.newly_solid.push_back(id);
            note_scheduled(qtx.tx.id);
            reqsolid.erase(qtx.tx.id);
            out.scheduled.push_back({std::move(qtx.tx), qtx.received_from, true});
            hr.outcome = HeadOutcome::Scheduled;
            return hr;
        }
        // Blocked. Ask for whatever is missing, unless it is already pending,
        // sitting in this inbox, or went through the scheduler before.
        for (const auto& p : tx.parents) {
            if (ledger.contains(p)) continue;  // present but unsolid: already chased
            if (reqsolid.contains(p) || inbox.contains(p) || scheduled_ids_.contains(p))
                continue;
            if (reqsolid.add(p, now)) out.requests.push_back(p);
        }
    }

    if (now - tx.timestamp > params.max_age) {
        QueuedTx qtx = inbox.pop_front(issuer);
        out.evicted.push_back(std::move(qtx.tx));
        hr.outcome = HeadOutcome::BlockedUnsolid;
        hr.evicted = true;
        return hr;
    }
    hr.outcome = HeadOutcome::BlockedUnsolid;
    return hr;
}

void DrrScheduler::note_scheduled(const TransactionId& id) {
    ++scheduled_count_;
    if (scheduled_ids_.size() < kScheduledIdCap) scheduled_ids_.insert(id);
}

std::vector<Transaction> solidification_reply(const Ledger& ledger,
                                              const TransactionId& missing,
                                              int max_batch) {
    std::vector<Transaction> batch;
    if (!ledger.contains(missing) || max_batch < 1) return batch;

    // breadth-first through parents: the requested transaction and its
    // nearest held ancestors
    std::vector<TransactionId> order{missing};
    std::unordered_set<TransactionId> seen{missing};
    for (std::size_t k = 0; k < order.size() && order.size() < std::size_t(max_batch); ++k) {
        for (const auto& p : ledger.get(order[k]).parents) {
            if (order.size() >= std::size_t(max_batch)) break;
            if (!ledger.contains(p) || ledger.get(p).is_genesis()) continue;
            if (seen.insert(p).second) order.push_back(p);
        }
    }
    batch.reserve(order.size());
    for (auto it = order.rbegin(); it != order.rend(); ++it) batch.push_back(ledger.get(*it));
    return batch;
}

std::vector<TransactionId> retry_requests(ReqSolid& reqsolid, const Ledger& ledger,
                                          double now, const ProtocolParams& params) {
    std::vector<TransactionId> due;
    auto& entries = reqsolid.entries();
    for (auto it = entries.begin(); it != entries.end();) {
        if (ledger.contains(it->first)) {
            it = entries.erase(it);
            continue;
        }
        if (now - it->second.first_at > params.max_age) {
            it = entries.erase(it);  // abandoned; consumers age out too
            continue;
        }
        if (now - it->second.last_sent >= params.retry_interval) {
            it->second.last_sent = now;
            due.push_back(it->first);
        }
        ++it;
    }
    return due;
}

}  // namespace dagsim
