#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "dagsim/pipeline.hpp"

using namespace dagsim;

namespace {

Transaction mk(NodeId issuer, std::uint64_t seq, double ts, double work = 1.0) {
    Transaction tx;
    tx.id = {issuer, seq};
    tx.timestamp = ts;
    tx.work = work;
    return tx;
}

/// reps[i] = protocol reputation of node i (already on the absolute scale)
ReputationTable table(std::vector<double> reps) {
    double total = 0;
    for (double r : reps) total += r;
    return ReputationTable(std::move(reps), total);
}

/// Independent replay of the drop policy: repeatedly find the issuer with
/// the largest scaled queue length and remove its newest transaction.
std::vector<TransactionId> drop_oracle(
    std::map<NodeId, std::vector<Transaction>> queues,  // timestamp-sorted
    const ReputationTable& reps, double capacity) {
    std::vector<TransactionId> dropped;
    auto total = [&] {
        double sum = 0;
        for (auto& [i, q] : queues)
            for (auto& tx : q) sum += tx.work;
        return sum;
    };
    while (total() > capacity) {
        NodeId victim = 0;
        double worst = -1;
        for (auto& [i, q] : queues) {
            double work = 0;
            for (auto& tx : q) work += tx.work;
            double scaled = work / reps.rep(i);
            if (!q.empty() && scaled > worst) {
                worst = scaled;
                victim = i;
            }
        }
        dropped.push_back(queues[victim].back().id);
        queues[victim].pop_back();
    }
    return dropped;
}

}  // namespace

TEST_CASE("scaled queue length follows work / reputation") {
    ReputationTable reps = table({2.0, 0.6});
    Inbox inbox;
    for (int i = 0; i < 10; ++i) inbox.insert({mk(0, std::uint64_t(i), double(i)), 0});
    CHECK(inbox.scaled_len(0, reps.rep(0)) == doctest::Approx(5.0));
    CHECK(inbox.scaled_len(1, reps.rep(1)) == 0.0);  // absent queue

    Inbox inbox2;
    for (int i = 0; i < 3; ++i) inbox2.insert({mk(1, std::uint64_t(i), double(i)), 0});
    CHECK(inbox2.scaled_len(1, reps.rep(1)) == doctest::Approx(5.0));  // 3 / 0.6

    CHECK_THROWS(inbox.scaled_len(0, 0.0));
}

TEST_CASE("arrival filter verdicts") {
    Ledger ledger;
    Inbox inbox;
    BlacklistState bl;
    std::unordered_set<TransactionId> scheduled;
    ProtocolParams params;

    Transaction fresh = mk(3, 0, 10.0);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, fresh, 11.0, params.max_age) ==
          FilterVerdict::Accept);

    // second delivery via another neighbour: duplicate
    inbox.insert({fresh, 1});
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, fresh, 11.0, params.max_age) ==
          FilterVerdict::Duplicate);

    // ledger and scheduled-history duplicates
    Transaction written = mk(4, 0, 10.0);
    written.parents = {ledger.genesis()};
    ledger.attach(written);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, written, 11.0, params.max_age) ==
          FilterVerdict::Duplicate);
    Transaction old_sched = mk(5, 0, 10.0);
    scheduled.insert(old_sched.id);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, old_sched, 11.0, params.max_age) ==
          FilterVerdict::Duplicate);

    Transaction stale = mk(6, 0, 10.0);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, stale, 41.0, params.max_age) ==
          FilterVerdict::TooOld);

    Transaction spam = mk(7, 0, 50.5);
    bl.add(7, 50.0);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, spam, 51.0, params.max_age) ==
          FilterVerdict::FromBlacklisted);

    // issued before the blacklisting event: still accepted, other nodes are
    // scheduling it as normal
    Transaction straggler = mk(7, 1, 49.0);
    CHECK(filter_incoming(ledger, inbox, scheduled, bl, straggler, 51.0, params.max_age) ==
          FilterVerdict::Accept);
}

TEST_CASE("the arrival crossing W_BL triggers blacklisting and is dropped") {
    ReputationTable reps = table({1.0, 10.0});
    ProtocolParams params;  // W_BL = 5
    Inbox inbox;
    BlacklistState bl;

    for (int i = 0; i < 5; ++i) {
        auto res = enqueue_incoming(inbox, bl, {mk(0, std::uint64_t(i), double(i)), 9}, double(i),
                                    reps, params);
        CHECK(res.outcome == EnqueueOutcome::Queued);
    }
    CHECK(inbox.work_of(0) == 5.0);

    auto res = enqueue_incoming(inbox, bl, {mk(0, 5, 5.0), 9}, 50.0, reps, params);
    CHECK(res.outcome == EnqueueOutcome::TriggeredBlacklist);
    REQUIRE(res.dropped.size() == 1);
    CHECK(res.dropped[0].first.id == TransactionId{0, 5});
    CHECK(res.dropped[0].second == DropReason::BlacklistTrigger);
    CHECK(inbox.work_of(0) == 5.0);  // the prior five stay queued
    CHECK(bl.contains(0));
    CHECK(bl.t_bl.at(0) == 50.0);
    CHECK(bl.last_event == 50.0);

    // high reputation keeps the scaled length low
    for (int i = 0; i < 5; ++i) {
        auto r = enqueue_incoming(inbox, bl, {mk(1, std::uint64_t(i), double(i)), 9}, double(i),
                                  reps, params);
        CHECK(r.outcome == EnqueueOutcome::Queued);
    }
    CHECK(inbox.scaled_len(1, reps.rep(1)) == doctest::Approx(0.5));
}

TEST_CASE("queues stay sorted by timestamp; FIFO mode preserves arrival order") {
    Inbox sorted(true);
    sorted.insert({mk(0, 0, 3.0), 0});
    sorted.insert({mk(0, 1, 2.0), 0});
    CHECK(sorted.front(0)->tx.timestamp == 2.0);

    Inbox fifo(false);
    fifo.insert({mk(0, 0, 3.0), 0});
    fifo.insert({mk(0, 1, 2.0), 0});
    CHECK(fifo.front(0)->tx.timestamp == 3.0);
}

TEST_CASE("timestamp order is preserved under random operations") {
    Rng rng(17);
    Inbox inbox;
    for (int step = 0; step < 2000; ++step) {
        NodeId issuer = NodeId(rng.uniform_index(4));
        double action = rng.uniform01();
        if (action < 0.6) {
            inbox.insert({mk(issuer, std::uint64_t(step), rng.uniform(0.0, 100.0)), 0});
        } else if (action < 0.8 && inbox.front(issuer)) {
            inbox.pop_front(issuer);
        } else if (inbox.front(issuer)) {
            inbox.pop_back(issuer);
        }
        for (const auto& [i, flow] : inbox.flows())
            for (std::size_t k = 1; k < flow.queue.size(); ++k)
                REQUIRE(flow.queue[k - 1].tx.timestamp <= flow.queue[k].tx.timestamp);
    }
}

TEST_CASE("equal timestamps break ties by (issuer, seq)") {
    Inbox inbox;
    inbox.insert({mk(0, 5, 1.0), 0});
    inbox.insert({mk(0, 2, 1.0), 0});
    inbox.insert({mk(0, 9, 1.0), 0});
    CHECK(inbox.front(0)->tx.id.seq == 2);
}

TEST_CASE("drop policy removes from the largest scaled queue, newest first") {
    ReputationTable reps = table({1.0, 4.0});
    ProtocolParams params;
    params.inbox_capacity = 10.0;
    Inbox inbox;
    BlacklistState bl;
    // issuer 0: 8 work at rep 1 (scaled 8); issuer 1: 4 work at rep 4 (scaled 1)
    for (int i = 0; i < 8; ++i) inbox.insert({mk(0, std::uint64_t(i), double(i)), 0});
    for (int i = 0; i < 3; ++i) inbox.insert({mk(1, std::uint64_t(i), double(i)), 0});
    auto res = enqueue_incoming(inbox, bl, {mk(1, 3, 3.5), 0}, 3.5, reps, params);

    CHECK(res.dropped.size() == 2);
    for (const auto& [tx, reason] : res.dropped) {
        CHECK(tx.id.issuer == 0);
        CHECK(reason == DropReason::Buffer);
    }
    // newest-first from issuer 0
    CHECK(res.dropped[0].first.id.seq == 7);
    CHECK(res.dropped[1].first.id.seq == 6);
    CHECK(inbox.total_work() == 10.0);
    CHECK_FALSE(bl.contains(1));  // 4 work / rep 4 = 1 < W_BL
}

TEST_CASE("drop policy agrees with the argmax replay oracle") {
    Rng rng(31);
    for (int round = 0; round < 200; ++round) {
        int issuers = 2 + int(rng.uniform_index(4));
        std::vector<double> reps_raw;
        for (int i = 0; i < issuers; ++i) reps_raw.push_back(rng.uniform(0.5, 8.0));
        ReputationTable reps = table(reps_raw);

        Inbox inbox;
        std::map<NodeId, std::vector<Transaction>> queues;
        for (NodeId i = 0; i < NodeId(issuers); ++i) {
            int n = int(rng.uniform_index(8));
            for (int k = 0; k < n; ++k) {
                Transaction tx = mk(i, std::uint64_t(k), double(k));
                inbox.insert({tx, 0});
                queues[i].push_back(tx);
            }
        }
        double capacity = rng.uniform(1.0, 12.0);
        auto expected = drop_oracle(queues, reps, capacity);
        auto actual = drop_policy(inbox, reps, capacity);
        REQUIRE(actual.size() == expected.size());
        for (std::size_t k = 0; k < actual.size(); ++k)
            REQUIRE(actual[k].id == expected[k]);
        REQUIRE(inbox.total_work() <= capacity);
    }
}

TEST_CASE("drop policy is a no-op under capacity and hits own traffic when alone") {
    ReputationTable reps = table({1.0});
    Inbox inbox;
    inbox.insert({mk(0, 0, 0.0), 0});
    CHECK(drop_policy(inbox, reps, 10.0).empty());

    for (int i = 1; i < 6; ++i) inbox.insert({mk(0, std::uint64_t(i), double(i)), 0});
    auto dropped = drop_policy(inbox, reps, 4.0);
    CHECK(dropped.size() == 2);
    CHECK(dropped[0].id.seq == 5);
    CHECK(dropped[1].id.seq == 4);
}

TEST_CASE("blacklist horizon") {
    BlacklistState bl;
    CHECK(horizon_latest(bl, 50.0) == std::numeric_limits<double>::infinity());
    CHECK(horizon_for(bl, 3, 50.0) == std::numeric_limits<double>::infinity());

    bl.add(3, 40.0);
    CHECK(horizon_latest(bl, 50.0) == doctest::Approx(10.0));
    CHECK(horizon_for(bl, 3, 50.0) == doctest::Approx(10.0));
    CHECK(horizon_for(bl, 4, 50.0) == std::numeric_limits<double>::infinity());

    // the most recent event drives the latest horizon
    bl.add(7, 45.0);
    CHECK(horizon_latest(bl, 50.0) == doctest::Approx(5.0));
    CHECK(horizon_for(bl, 3, 50.0) == doctest::Approx(10.0));
}

TEST_CASE("blacklist set only grows") {
    BlacklistState bl;
    bl.add(1, 10.0);
    bl.add(2, 12.0);
    bl.add(1, 15.0);  // refresh keeps membership
    CHECK(bl.blacklisted.size() == 2);
    CHECK(bl.t_bl.at(1) == 15.0);
}
