#pragma once

#include <cstdint>
#include <queue>
#include <variant>
#include <vector>

#include "dagsim/types.hpp"

namespace dagsim {

struct TxMsg {
    Transaction tx;
};

struct SolidReqMsg {
    TransactionId missing;
    NodeId requester = 0;
};

struct SolidRespMsg {
    /// Requested transaction plus nearby past-cone members, ancestors first.
    std::vector<Transaction> txs;
};

using Message = std::variant<TxMsg, SolidReqMsg, SolidRespMsg>;

enum class EventKind : std::uint8_t {
    Deliver,
    SchedulerTick,
    IssueTick,
    RetryTimer,
    RepeerCheck,
    Sample,
    ScenarioAction,
};

struct Event {
    double at = 0.0;
    std::uint64_t seq = 0;  // insertion order; breaks time ties deterministically
    EventKind kind = EventKind::Deliver;
    NodeId node = 0;  // target
    NodeId from = 0;  // sender for Deliver
    std::int32_t aux = 0;   // issue stream slot / action index
    std::uint64_t gen = 0;  // issue generation; stale IssueTicks are ignored
    Message msg;
};

/// Global simulated-time priority queue. Events pop in nondecreasing time,
/// ties broken by insertion sequence.
class EventQueue {
public:
    void push(Event ev) {
        ev.seq = next_seq_++;
        heap_.push(std::move(ev));
    }

    bool empty() const { return heap_.empty(); }
    const Event& top() const { return heap_.top(); }

    Event pop() {
        Event ev = heap_.top();
        heap_.pop();
        return ev;
    }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

}  // namespace dagsim
