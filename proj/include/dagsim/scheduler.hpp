#pragma once

#include <map>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dagsim/ledger.hpp"
#include "dagsim/params.hpp"
#include "dagsim/pipeline.hpp"
#include "dagsim/reputation.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

/// Outstanding solidification requests, at most one per missing id.
class ReqSolid {
public:
    struct Entry {
        double first_at = 0.0;
        double last_sent = 0.0;
        NodeId last_target = kGenesisIssuer;  // avoided on the next retry
    };

    bool contains(const TransactionId& id) const { return pending_.contains(id); }
    bool add(const TransactionId& id, double now) {
        return pending_.emplace(id, Entry{now, now, kGenesisIssuer}).second;
    }
    void erase(const TransactionId& id) { pending_.erase(id); }
    std::size_t size() const { return pending_.size(); }
    std::map<TransactionId, Entry>& entries() { return pending_; }
    const std::map<TransactionId, Entry>& entries() const { return pending_; }

private:
    std::map<TransactionId, Entry> pending_;
};

enum class HeadOutcome { Scheduled, BlockedUnsolid, Empty };

/// DRR- scheduler state for one node. Serves the inbox ring at the fixed
/// writing power, gates heads on solidity and records scheduled ids.
class DrrScheduler {
public:
    struct ScheduledTx {
        Transaction tx;
        NodeId received_from = 0;
        bool new_to_ledger = true;  // false when it arrived earlier via a
                                    // solidification reply
    };

    struct TickResult {
        std::vector<ScheduledTx> scheduled;
        std::vector<TransactionId> requests;      // fresh solidification requests
        std::vector<Transaction> evicted;          // aged-out blocked heads
        std::vector<TransactionId> newly_solid;    // ledger transitions this tick
    };

    struct HeadResult {
        HeadOutcome outcome = HeadOutcome::Empty;
        bool evicted = false;  // head aged out; queue may have a new head
    };

    /// One scheduler activation. At most nu * dt work units are scheduled
    /// per activation, where dt is the tick interval (|tx|/nu by default, so
    /// one work unit). Visits issuers in ring order from the saved cursor;
    /// empty queues earn quantum capped at DC_max, a backlogged queue earns
    /// quantum once per visit and drains while its deficit covers the head.
    TickResult tick(Inbox& inbox, Ledger& ledger, ReqSolid& reqsolid,
                    const ReputationTable& reps, const ProtocolParams& params,
                    double now, double work_budget);

    /// Attempts to schedule the head of one issuer's queue, emitting
    /// solidification requests for missing parents per the
    /// ReqSolid/Tran/Scheduled guard.
    HeadResult try_schedule_head(NodeId issuer, Inbox& inbox, Ledger& ledger,
                                 ReqSolid& reqsolid, const ProtocolParams& params,
                                 double now, TickResult& out);

    bool was_scheduled(const TransactionId& id) const { return scheduled_ids_.contains(id); }
    const std::unordered_set<TransactionId>& scheduled_ids() const { return scheduled_ids_; }
    std::uint64_t scheduled_count() const { return scheduled_count_; }

private:
    void note_scheduled(const TransactionId& id);

    std::size_t cursor_ = 0;
    std::unordered_set<TransactionId> scheduled_ids_;
    std::uint64_t scheduled_count_ = 0;

    // duplicate-detection history cap
    static constexpr std::size_t kScheduledIdCap = 1'000'000;
};

/// Responder side of a solidification request: the requested transaction
/// plus up to max_batch - 1 of its nearest past-cone members, ordered
/// ancestors-first so the requester can attach them in sequence. Empty when
/// the responder does not hold the requested id. The requester recurses on
/// whatever is still missing, so deep gaps resolve in a few round trips
/// instead of one per transaction.
std::vector<Transaction> solidification_reply(const Ledger& ledger,
                                              const TransactionId& missing,
                                              int max_batch);

/// Requests pending longer than the retry interval, due for re-emission to
/// a fresh neighbour. Entries whose target arrived meanwhile are removed;
/// entries pending beyond max_age are abandoned (their consumers age out of
/// the inbox on the same clock).
std::vector<TransactionId> retry_requests(ReqSolid& reqsolid, const Ledger& ledger,
                                          double now, const ProtocolParams& params);

}  // namespace dagsim
