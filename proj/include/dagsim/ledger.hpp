#pragma once

#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dagsim/rng.hpp"
#include "dagsim/types.hpp"

namespace dagsim {

/// Per-node DAG ledger with solidity tracking and tip selection.
///
/// A transaction is solid when its whole past cone is present. Unsolid
/// transactions are stored (they may arrive out of order through gossip or
/// solidification replies) but are excluded from the tip set. Every ledger
/// starts with a synthetic genesis transaction which is always solid.
class Ledger {
public:
    enum class AttachOutcome { AddedSolid, AddedUnsolid, Duplicate };

    struct AttachResult {
        AttachOutcome outcome = AttachOutcome::Duplicate;
        /// Transactions that transitioned to solid because of this attach,
        /// in cascade order (the attached one first when it solidified).
        std::vector<TransactionId> newly_solid;
    };

    struct PastCone {
        std::set<TransactionId> known;    // ancestors present in the ledger
        std::set<TransactionId> missing;  // referenced but not present
    };

    explicit Ledger(double genesis_time = 0.0);

    AttachResult attach(Transaction tx);

    bool contains(const TransactionId& id) const { return txs_.contains(id); }
    bool is_solid(const TransactionId& id) const { return solid_.contains(id); }

    /// Ancestors of `id` (excluding `id`), split into known and missing.
    /// Throws UnknownTransaction when `id` itself is not present.
    PastCone past_cone(const TransactionId& id) const;

    /// Parents of `id` that are not present in the ledger.
    std::vector<TransactionId> missing_parents(const TransactionId& id) const;

    /// Draws up to k distinct tips uniformly at random; returns all tips when
    /// fewer than k exist. Never empty (genesis bootstraps the tip set).
    std::vector<TransactionId> select_tips(int k, Rng& rng) const;

    const Transaction& get(const TransactionId& id) const;
    const TransactionId& genesis() const { return genesis_id_; }

    std::size_t size() const { return txs_.size(); }
    std::size_t solid_count() const { return solid_.size(); }
    std::size_t tip_count() const { return tips_.size(); }
    const std::vector<TransactionId>& tips() const { return tips_; }

    /// Ids of all stored transactions, sorted (snapshot for checks).
    std::vector<TransactionId> all_ids_sorted() const;

private:
    void mark_solid_cascade(const TransactionId& root, std::vector<TransactionId>& out);
    void remove_tip(const TransactionId& id);

    std::unordered_map<TransactionId, Transaction> txs_;
    std::unordered_set<TransactionId> solid_;
    // pending_[id] = number of parents of id not yet solid (id attached, unsolid)
    std::unordered_map<TransactionId, int> pending_;
    // children_[p] = attached transactions listing p as parent
    std::unordered_map<TransactionId, std::vector<TransactionId>> children_;
    std::vector<TransactionId> tips_;
    std::unordered_map<TransactionId, std::size_t> tip_pos_;
    TransactionId genesis_id_;
};

}  // namespace dagsim
