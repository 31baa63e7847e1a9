#pragma once

#include <cstdint>
#include <vector>

#include "dagsim/ledger.hpp"
#include "dagsim/pipeline.hpp"
#include "dagsim/rate_setter.hpp"
#include "dagsim/rng.hpp"
#include "dagsim/scenario.hpp"
#include "dagsim/scheduler.hpp"

namespace dagsim {

/// Full per-node protocol state. Owned and mutated only by the simulation
/// instance's event handlers; instances never share node state.
struct Node {
    NodeId id = 0;
    RoleKind role = RoleKind::BestEffort;
    MaliciousStrategy strategy;
    bool issuing_enabled = true;  // cleared while churned offline

    Ledger ledger;
    Inbox inbox;
    BlacklistState blacklist;
    DrrScheduler scheduler;
    ReqSolid reqsolid;
    RateState rate;
    Rng rng;

    std::uint64_t next_seq = 0;
    std::uint64_t enqueued_own = 0;
    // multi-rate attackers: one transaction stream per neighbour slot
    std::vector<std::uint64_t> stream_count;
    std::vector<NodeId> stream_targets;
    std::uint64_t issue_gen = 0;

    Node() : inbox(true) {}

    bool is_malicious() const { return role == RoleKind::Malicious; }
};

}  // namespace dagsim
