#include "dagsim/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>

namespace dagsim {

namespace {
constexpr std::uint64_t kTopologyStream = 1;
constexpr std::uint64_t kDelayStream = 2;
constexpr std::uint64_t kNodeStreamBase = 1000;

std::vector<bool> honest_mask(const ScenarioConfig& cfg) {
    std::vector<bool> honest(std::size_t(cfg.nodes), true);
    for (const auto& a : cfg.attackers) honest[a.node] = false;
    return honest;
}
}  // namespace

Simulation::Simulation(ScenarioConfig cfg, std::uint64_t seed)
    : cfg_(std::move(cfg)),
      seed_(seed),
      metrics_(cfg_.nodes, honest_mask(cfg_), cfg_.log_arrivals),
      delay_rng_(Rng::derive(seed, kDelayStream)) {
    cfg_.validate();

    auto weights = cfg_.reputation_weights.empty()
                       ? zipf_weights(cfg_.nodes, cfg_.zipf_exponent)
                       : cfg_.reputation_weights;
    reps_ = ReputationTable(std::move(weights), cfg_.total_rep());

    Rng topo_rng = Rng::derive(seed, kTopologyStream);
    topo_ = Topology::build(cfg_.nodes, cfg_.degree, topo_rng);

    tick_interval_ = cfg_.params.tx_work / cfg_.params.nu;
    tick_budget_ = cfg_.params.nu * tick_interval_;

    nodes_.resize(std::size_t(cfg_.nodes));
    for (NodeId i = 0; i < NodeId(cfg_.nodes); ++i) {
        Node& node = nodes_[i];
        node.id = i;
        node.role = cfg_.role_of(i);
        node.rng = Rng::derive(seed, kNodeStreamBase + i);
        node.inbox = Inbox(!cfg_.params.disable_timestamp_order);
        if (const AttackerSpec* spec = cfg_.attacker(i)) {
            node.strategy = spec->strategy;
            if (node.strategy.multi_rate) {
                node.stream_targets.assign(topo_.neighbours(i).begin(),
                                           topo_.neighbours(i).end());
                node.stream_count.assign(node.stream_targets.size(), 0);
            }
        }
        switch (node.role) {
            case RoleKind::Content:
                node.rate.lambda = cfg_.content_fraction * reps_.fair_rate(i, cfg_.params.nu);
                break;
            case RoleKind::BestEffort:
                node.rate.lambda = reps_.fair_rate(i, cfg_.params.nu);
                break;
            default:
                node.rate.lambda = 0.0;
        }
    }

    for (std::size_t k = 0; k < cfg_.reputation_changes.size(); ++k)
        actions_.push_back({Action::RepChange, k});
    for (std::size_t k = 0; k < cfg_.churn.size(); ++k) {
        actions_.push_back({Action::ChurnOff, k});
        actions_.push_back({Action::ChurnOn, k});
    }

    seed_initial_events();
}

void Simulation::seed_initial_events() {
    for (Node& node : nodes_) {
        Event tick;
        tick.at = tick_interval_;
        tick.kind = EventKind::SchedulerTick;
        tick.node = node.id;
        queue_.push(tick);

        Event retry;
        retry.at = cfg_.params.retry_interval;
        retry.kind = EventKind::RetryTimer;
        retry.node = node.id;
        queue_.push(retry);

        if (node.is_malicious()) {
            if (node.strategy.multi_rate) {
                for (int s = 0; s < int(node.stream_targets.size()); ++s)
                    arm_issue(node, s);
            } else {
                arm_issue(node, -1);
            }
            if (node.strategy.repeering) {
                Event check;
                check.at = 1.0;
                check.kind = EventKind::RepeerCheck;
                check.node = node.id;
                queue_.push(check);
            }
        } else if (node.role != RoleKind::Inactive) {
            arm_issue(node, -1);
        }
    }

    Event sample;
    sample.at = cfg_.sample_period;
    sample.kind = EventKind::Sample;
    queue_.push(sample);

    for (std::size_t k = 0; k < actions_.size(); ++k) {
        const Action& a = actions_[k];
        Event ev;
        ev.kind = EventKind::ScenarioAction;
        ev.aux = std::int32_t(k);
        switch (a.kind) {
            case Action::RepChange: ev.at = cfg_.reputation_changes[a.index].time; break;
            case Action::ChurnOff: ev.at = cfg_.churn[a.index].offline; break;
            case Action::ChurnOn: ev.at = cfg_.churn[a.index].online; break;
        }
        queue_.push(ev);
    }
}

double Simulation::issue_rate(const Node& node, int slot) const {
    double fair = reps_.fair_rate(node.id, cfg_.params.nu);
    if (node.is_malicious()) {
        // spammers ignore the rate setter; multi-rate streams each stay at
        // the allowed rate (times the spam factor when combining both)
        (void)slot;
        return node.strategy.spam_factor * fair;
    }
    if (node.role == RoleKind::Content) return cfg_.content_fraction * fair;
    return node.rate.lambda;
}

void Simulation::arm_issue(Node& node, int slot) {
    double rate = issue_rate(node, slot);
    if (rate <= 0.0) return;
    RateState probe = node.rate;
    probe.lambda = rate;
    double at = sample_next_issue(probe, node.rng, now_);
    if (!std::isfinite(at)) return;
    Event ev;
    ev.at = at;
    ev.kind = EventKind::IssueTick;
    ev.node = node.id;
    ev.aux = std::int32_t(slot);
    ev.gen = node.issue_gen;
    queue_.push(ev);
}

RunResult Simulation::run() {
    while (!queue_.empty() && queue_.top().at <= cfg_.duration) {
        Event ev = queue_.pop();
        now_ = ev.at;
        switch (ev.kind) {
            case EventKind::Deliver: handle_deliver(ev); break;
            case EventKind::SchedulerTick: handle_scheduler_tick(nodes_[ev.node]); break;
            case EventKind::IssueTick: handle_issue(nodes_[ev.node], ev); break;
            case EventKind::RetryTimer: handle_retry(nodes_[ev.node]); break;
            case EventKind::RepeerCheck: handle_repeer_check(nodes_[ev.node]); break;
            case EventKind::Sample: handle_sample(); break;
            case EventKind::ScenarioAction: handle_action(ev); break;
        }
    }
    now_ = cfg_.duration;
    RunResult out;
    finalize(out);
    return out;
}

void Simulation::handle_scheduler_tick(Node& node) {
    auto res = node.scheduler.tick(node.inbox, node.ledger, node.reqsolid, reps_,
                                   cfg_.params, now_, tick_budget_);
    for (const auto& id : res.newly_solid) metrics_.on_solid_arrival(id, node.id, now_);
    for (auto& sched : res.scheduled) {
        metrics_.on_schedule(node.id);
        metrics_.on_write(sched.tx.id, node.id, now_);
        if (!cfg_.params.disable_solidification && !node.ledger.is_solid(sched.tx.id))
            ++gate_violations_;
        gossip(node, sched.tx, sched.received_from);
    }
    for (const auto& id : res.requests) send_request(node, id);
    for (auto& tx : res.evicted) metrics_.on_drop(tx, node.id, DropReason::Expired, now_);

    Event next;
    next.at = now_ + tick_interval_;
    next.kind = EventKind::SchedulerTick;
    next.node = node.id;
    queue_.push(next);
}

void Simulation::handle_issue(Node& node, const Event& ev) {
    if (ev.gen != node.issue_gen) return;  // cancelled by churn
    if (!node.issuing_enabled) return;
    if (node.is_malicious())
        malicious_issue(node, ev.aux);
    else
        honest_issue(node);
    arm_issue(node, ev.aux);
}

void Simulation::honest_issue(Node& node) {
    if (node.role == RoleKind::Content)
        node.rate.lambda = cfg_.content_fraction * reps_.fair_rate(node.id, cfg_.params.nu);

    Transaction tx;
    tx.id = TransactionId{node.id, node.next_seq++};
    tx.parents = node.ledger.select_tips(cfg_.params.parents, node.rng);
    tx.timestamp = now_;
    tx.work = cfg_.params.tx_work;
    metrics_.on_issue(tx, now_);

    node.enqueued_own++;
    metrics_.on_enqueue_own(node.id);
    auto res = enqueue_own(node.inbox, {tx, node.id}, reps_, cfg_.params);
    for (auto& [dropped, reason] : res.dropped)
        metrics_.on_drop(dropped, node.id, reason, now_);

    if (node.role == RoleKind::BestEffort) {
        double own_scaled = node.inbox.scaled_len(node.id, reps_.rep(node.id));
        rate_update(node.rate, now_, own_scaled, horizon_latest(node.blacklist, now_),
                    reps_.weight(node.id), reps_.fair_rate(node.id, cfg_.params.nu),
                    cfg_.params);
    }
}

void Simulation::malicious_issue(Node& node, int slot) {
    if (node.strategy.multi_rate &&
        (slot < 0 || std::size_t(slot) >= node.stream_targets.size()))
        return;
    Transaction tx;
    if (node.strategy.multi_rate) {
        // disjoint seq space per stream slot
        tx.id = TransactionId{node.id, (std::uint64_t(slot) << 40) |
                                           node.stream_count[std::size_t(slot)]++};
    } else {
        tx.id = TransactionId{node.id, node.next_seq++};
    }
    tx.parents = node.ledger.select_tips(cfg_.params.parents, node.rng);
    tx.timestamp = now_;
    tx.work = cfg_.params.tx_work;
    metrics_.on_issue(tx, now_);

    auto attach = node.ledger.attach(tx);
    for (const auto& id : attach.newly_solid) metrics_.on_solid_arrival(id, node.id, now_);

    if (node.strategy.multi_rate) {
        NodeId target = node.stream_targets[std::size_t(slot)];
        if (topo_.adjacent(node.id, target)) send(node.id, target, TxMsg{std::move(tx)});
    } else {
        for (NodeId nb : topo_.neighbours(node.id)) send(node.id, nb, TxMsg{tx});
    }
}

void Simulation::handle_deliver(const Event& ev) {
    Node& node = nodes_[ev.node];
    if (std::holds_alternative<TxMsg>(ev.msg)) {
        deliver_tx(node, std::get<TxMsg>(ev.msg).tx, ev.from);
    } else if (std::holds_alternative<SolidReqMsg>(ev.msg)) {
        const auto& req = std::get<SolidReqMsg>(ev.msg);
        if (node.is_malicious() && !cfg_.attacker_answers_solidification) return;
        auto batch = solidification_reply(node.ledger, req.missing,
                                          cfg_.params.solidification_batch);
        if (!batch.empty())
            send(node.id, req.requester, SolidRespMsg{std::move(batch)});
    } else {
        // ancestors-first order keeps recursion requests to genuine gaps
        for (auto& tx : std::get<SolidRespMsg>(ev.msg).txs)
            attach_via_solidification(node, tx);
    }
}

void Simulation::deliver_tx(Node& node, const Transaction& tx, NodeId from) {
    FilterVerdict verdict =
        filter_incoming(node.ledger, node.inbox, node.scheduler.scheduled_ids(),
                        node.blacklist, tx, now_, cfg_.params.max_age);
    if (verdict != FilterVerdict::Accept) {
        metrics_.on_filtered(node.id, verdict);
        return;
    }
    metrics_.on_accept(node.id);
    auto res = enqueue_incoming(node.inbox, node.blacklist, {tx, from}, now_, reps_,
                                cfg_.params);
    if (res.outcome == EnqueueOutcome::TriggeredBlacklist) {
        metrics_.on_blacklist(node.id, tx.id.issuer, now_);
#ifdef DAGSIM_TRACE_BLACKLIST
        if (!nodes_[tx.id.issuer].is_malicious() && !node.is_malicious()) {
            const auto* flow = node.inbox.find_flow(tx.id.issuer);
            std::fprintf(stderr, "[HH] t=%.2f obs=%u victim=%u qwork=%.0f qlen=%zu\n",
                         now_, node.id, tx.id.issuer, flow ? flow->work : 0.0,
                         flow ? flow->queue.size() : 0);
            if (flow && !flow->queue.empty()) {
                const auto& head = flow->queue.front().tx;
                std::fprintf(stderr, "     head %s ts=%.2f age=%.2f parents:", head.id.str().c_str(),
                             head.timestamp, now_ - head.timestamp);
                for (const auto& p : head.parents)
                    std::fprintf(stderr, " %s[%s%s]", p.str().c_str(),
                                 node.ledger.contains(p) ? "L" : "-",
                                 node.ledger.is_solid(p) ? "S" : "-");
                std::fprintf(stderr, " reqsolid=%zu\n", node.reqsolid.size());
                for (const auto& p : head.parents) {
                    if (node.ledger.is_solid(p)) continue;
                    auto it = node.reqsolid.entries().find(p);
                    if (it != node.reqsolid.entries().end())
                        std::fprintf(stderr, "     pending %s first=%.2f last=%.2f\n",
                                     p.str().c_str(), it->second.first_at, it->second.last_sent);
                    else
                        std::fprintf(stderr, "     parent %s NOT pending (inbox=%d sched=%d)\n",
                                     p.str().c_str(), int(node.inbox.contains(p)),
                                     int(node.scheduler.was_scheduled(p)));
                }
            }
        }
#endif
    }
    for (auto& [dropped, reason] : res.dropped)
        metrics_.on_drop(dropped, node.id, reason, now_);
}

void Simulation::attach_via_solidification(Node& node, Transaction tx) {
    node.reqsolid.erase(tx.id);
    if (node.ledger.contains(tx.id)) return;
    Transaction copy = tx;  // kept for the recursion below
    auto attach = node.ledger.attach(std::move(tx));
    for (const auto& id : attach.newly_solid) metrics_.on_solid_arrival(id, node.id, now_);
    if (attach.outcome == Ledger::AttachOutcome::AddedUnsolid &&
        !cfg_.params.disable_solidification)
        request_missing_parents(node, copy);
}

void Simulation::request_missing_parents(Node& node, const Transaction& tx) {
    for (const auto& p : tx.parents) {
        if (node.ledger.contains(p)) continue;
        if (node.reqsolid.contains(p) || node.inbox.contains(p) ||
            node.scheduler.was_scheduled(p))
            continue;
        if (node.reqsolid.add(p, now_)) send_request(node, p);
    }
}

void Simulation::handle_retry(Node& node) {
    for (const auto& id : retry_requests(node.reqsolid, node.ledger, now_, cfg_.params))
        send_request(node, id);
    Event next;
    next.at = now_ + cfg_.params.retry_interval;
    next.kind = EventKind::RetryTimer;
    next.node = node.id;
    queue_.push(next);
}

void Simulation::handle_repeer_check(Node& node) {
    if (node.is_malicious() && node.strategy.repeering) {
        const auto& nbs = topo_.neighbours(node.id);
        bool all_blacklisted = !nbs.empty();
        for (NodeId nb : nbs) {
            if (!nodes_[nb].blacklist.contains(node.id)) {
                all_blacklisted = false;
                break;
            }
        }
        if (all_blacklisted) {
            std::vector<NodeId> candidates;
            for (const Node& other : nodes_)
                if (!other.is_malicious() && other.id != node.id &&
                    !topo_.adjacent(node.id, other.id))
                    candidates.push_back(other.id);
            auto fresh = topo_.repeer(node.id, candidates, cfg_.degree, node.rng);
            if (node.strategy.multi_rate) {
                std::sort(fresh.begin(), fresh.end());
                node.stream_targets = fresh;
                node.stream_count.resize(node.stream_targets.size(), 0);
            }
        }
        Event next;
        next.at = now_ + 1.0;
        next.kind = EventKind::RepeerCheck;
        next.node = node.id;
        queue_.push(next);
    }
}

void Simulation::handle_sample() {
    for (const Node& node : nodes_) {
        for (const auto& [issuer, flow] : node.inbox.flows()) {
            if (flow.work <= 0.0) continue;
            metrics_.on_inbox_sample(now_, node.id, issuer,
                                     flow.work / reps_.rep(issuer));
        }
    }
    Event next;
    next.at = now_ + cfg_.sample_period;
    next.kind = EventKind::Sample;
    queue_.push(next);
}

void Simulation::handle_action(const Event& ev) {
    const Action& action = actions_[std::size_t(ev.aux)];
    if (action.kind == Action::RepChange) {
        const auto& change = cfg_.reputation_changes[action.index];
        if (change.scale)
            reps_.rescale(change.node, *change.scale);
        else
            reps_.set_weight(change.node, *change.weight);
        return;
    }
    const auto& churn = cfg_.churn[action.index];
    if (action.kind == Action::ChurnOff) {
        for (NodeId i : churn.nodes) {
            nodes_[i].issuing_enabled = false;
            nodes_[i].issue_gen++;
        }
        return;
    }
    for (NodeId i : churn.nodes) {
        Node& node = nodes_[i];
        node.issuing_enabled = true;
        node.issue_gen++;
        node.rate.lambda = reps_.fair_rate(i, cfg_.params.nu);
        if (node.role == RoleKind::Content) node.rate.lambda *= cfg_.content_fraction;
        node.rate.paused_until = 0.0;
        if (node.role != RoleKind::Inactive && !node.is_malicious()) arm_issue(node, -1);
    }
}

void Simulation::gossip(Node& node, const Transaction& tx, NodeId received_from) {
    for (NodeId nb : gossip_targets(topo_, node.id, tx.id.issuer, received_from))
        send(node.id, nb, TxMsg{tx});
}

void Simulation::send(NodeId from, NodeId to, Message msg) {
    Event ev;
    ev.at = now_ + sample_delay(delay_rng_, cfg_.delay);
    ev.kind = EventKind::Deliver;
    ev.node = to;
    ev.from = from;
    ev.msg = std::move(msg);
    queue_.push(ev);
}

void Simulation::send_request(Node& node, const TransactionId& missing) {
    const auto& nbs = topo_.neighbours(node.id);
    if (nbs.empty()) return;
    auto& entries = node.reqsolid.entries();
    auto it = entries.find(missing);
    NodeId avoid = it != entries.end() ? it->second.last_target : node.id;

    std::vector<NodeId> pool;
    for (NodeId nb : nbs)
        if (nb != avoid) pool.push_back(nb);
    if (pool.empty()) pool.assign(nbs.begin(), nbs.end());
    NodeId target = pool[node.rng.uniform_index(pool.size())];
    if (it != entries.end()) it->second.last_target = target;
    send(node.id, target, SolidReqMsg{missing, node.id});
}

void Simulation::finalize(RunResult& out) {
    out.seed = seed_;
    out.duration = cfg_.duration;
    metrics_.finish(out);

    for (const Node& node : nodes_) {
        out.ledger_sizes.push_back(node.ledger.size());
        out.ledger_solid.push_back(node.ledger.solid_count());
        out.still_queued.push_back(node.inbox.size());
    }

    // Consistency (settled transactions written by at least one honest node
    // must be present and solid in every honest ledger)
    double cutoff = cfg_.duration - cfg_.settle_margin;
    std::vector<std::pair<TransactionId, const TxStat*>> ordered;
    for (const auto& [id, stat] : out.txs)
        if (out.honest[stat.issuer] && stat.first_write < cutoff)
            ordered.emplace_back(id, &stat);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    for (const auto& [id, stat] : ordered) {
        bool written = false;
        for (const Node& node : nodes_) {
            if (!out.honest[node.id]) continue;
            if (node.scheduler.was_scheduled(id) && node.ledger.is_solid(id)) {
                written = true;
                break;
            }
        }
        if (!written) continue;
        out.consistency.checked++;
        int bad = 0;
        for (const Node& node : nodes_) {
            if (!out.honest[node.id]) continue;
            if (!node.ledger.is_solid(id)) ++bad;
        }
        if (bad > 0) {
            out.consistency.violations++;
            if (out.consistency.examples.size() < 100)
                out.consistency.examples.emplace_back(id, bad);
        }
    }

    if (gate_violations_ > 0)
        out.invariant_failures.push_back(
            "solidity gate: " + std::to_string(gate_violations_) +
            " transactions scheduled while unsolid");
}

}  // namespace dagsim
