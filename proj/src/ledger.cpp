#include "dagsim/ledger.hpp"

#include <algorithm>
#include <deque>

namespace dagsim {

Ledger::Ledger(double genesis_time) {
    Transaction genesis;
    genesis.id = TransactionId{kGenesisIssuer, 0};
    genesis.timestamp = genesis_time;
    genesis.work = 0.0;
    genesis_id_ = genesis.id;
    txs_.emplace(genesis.id, std::move(genesis));
    solid_.insert(genesis_id_);
    tips_.push_back(genesis_id_);
    tip_pos_[genesis_id_] = 0;
}

Ledger::AttachResult Ledger::attach(Transaction tx) {
    AttachResult res;
    if (txs_.contains(tx.id)) {
        res.outcome = AttachOutcome::Duplicate;
        return res;
    }
    TransactionId id = tx.id;
    int unsolid_parents = 0;
    for (const auto& p : tx.parents) {
        children_[p].push_back(id);
        if (!solid_.contains(p)) ++unsolid_parents;
    }
    txs_.emplace(id, std::move(tx));

    if (unsolid_parents == 0) {
        res.outcome = AttachOutcome::AddedSolid;
        mark_solid_cascade(id, res.newly_solid);
    } else {
        res.outcome = AttachOutcome::AddedUnsolid;
        pending_[id] = unsolid_parents;
    }
    return res;
}

void Ledger::mark_solid_cascade(const TransactionId& root, std::vector<TransactionId>& out) {
    std::deque<TransactionId> queue{root};
    while (!queue.empty()) {
        TransactionId id = queue.front();
        queue.pop_front();
        if (solid_.contains(id)) continue;
        solid_.insert(id);
        pending_.erase(id);
        out.push_back(id);

        // Tip bookkeeping: a freshly solid transaction cannot have a solid
        // child yet (children solidify strictly after all their parents), so
        // it becomes a tip; its parents stop being tips.
        tip_pos_[id] = tips_.size();
        tips_.push_back(id);
        for (const auto& p : txs_.at(id).parents) remove_tip(p);

        auto it = children_.find(id);
        if (it == children_.end()) continue;
        for (const auto& child : it->second) {
            auto pit = pending_.find(child);
            if (pit == pending_.end()) continue;
            if (--pit->second == 0) queue.push_back(child);
        }
    }
}

void Ledger::remove_tip(const TransactionId& id) {
    auto it = tip_pos_.find(id);
    if (it == tip_pos_.end()) return;
    std::size_t pos = it->second;
    std::size_t last = tips_.size() - 1;
    if (pos != last) {
        tips_[pos] = tips_[last];
        tip_pos_[tips_[pos]] = pos;
    }
    tips_.pop_back();
    tip_pos_.erase(it);
}

Ledger::PastCone Ledger::past_cone(const TransactionId& id) const {
    auto it = txs_.find(id);
    if (it == txs_.end()) throw UnknownTransaction(id);

    PastCone cone;
    std::unordered_set<TransactionId> seen;
    std::deque<TransactionId> queue;
    for (const auto& p : it->second.parents) queue.push_back(p);
    while (!queue.empty()) {
        TransactionId cur = queue.front();
        queue.pop_front();
        if (!seen.insert(cur).second) continue;
        auto cit = txs_.find(cur);
        if (cit == txs_.end()) {
            cone.missing.insert(cur);
            continue;
        }
        cone.known.insert(cur);
        for (const auto& p : cit->second.parents) queue.push_back(p);
    }
    return cone;
}

std::vector<TransactionId> Ledger::missing_parents(const TransactionId& id) const {
    auto it = txs_.find(id);
    if (it == txs_.end()) throw UnknownTransaction(id);
    std::vector<TransactionId> missing;
    for (const auto& p : it->second.parents)
        if (!txs_.contains(p)) missing.push_back(p);
    return missing;
}

std::vector<TransactionId> Ledger::select_tips(int k, Rng& rng) const {
    std::vector<TransactionId> pool = tips_;
    std::size_t want = std::size_t(k);
    if (pool.size() <= want) {
        std::sort(pool.begin(), pool.end());
        return pool;
    }
    // partial Fisher-Yates: k distinct draws
    std::vector<TransactionId> picked;
    picked.reserve(want);
    for (std::size_t i = 0; i < want; ++i) {
        std::size_t j = i + rng.uniform_index(pool.size() - i);
        std::swap(pool[i], pool[j]);
        picked.push_back(pool[i]);
    }
    return picked;
}

const Transaction& Ledger::get(const TransactionId& id) const {
    auto it = txs_.find(id);
    if (it == txs_.end()) throw UnknownTransaction(id);
    return it->second;
}

std::vector<TransactionId> Ledger::all_ids_sorted() const {
    std::vector<TransactionId> ids;
    ids.reserve(txs_.size());
    for (const auto& [id, tx] : txs_) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace dagsim
