#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagsim {

using NodeId = std::uint32_t;

/// Reserved issuer id for the synthetic genesis transaction.
inline constexpr NodeId kGenesisIssuer = std::numeric_limits<NodeId>::max();

/// Identifies a transaction by (issuer, per-issuer sequence number).
/// Multi-rate attackers allocate seq from disjoint strided spaces, one per
/// stream, so ids stay globally unique.
struct TransactionId {
    NodeId issuer = 0;
    std::uint64_t seq = 0;

    auto operator<=>(const TransactionId&) const = default;

    std::string str() const {
        return std::to_string(issuer) + ":" + std::to_string(seq);
    }
};

struct TransactionIdHash {
    std::size_t operator()(const TransactionId& id) const noexcept {
        std::uint64_t x = (std::uint64_t(id.issuer) << 32) ^ (id.seq + 0x9e3779b97f4a7c15ULL);
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        return std::size_t(x);
    }
};

struct Transaction {
    TransactionId id;
    std::vector<TransactionId> parents;  // empty only for genesis
    double timestamp = 0.0;              // issuer's clock at issue time, seconds
    double work = 1.0;

    bool is_genesis() const { return id.issuer == kGenesisIssuer; }
};

/// Thrown when a query names a transaction the ledger does not contain.
struct UnknownTransaction : std::runtime_error {
    explicit UnknownTransaction(const TransactionId& id)
        : std::runtime_error("unknown transaction " + id.str()) {}
};

/// Thrown for invalid or inconsistent scenario configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace dagsim

template <>
struct std::hash<dagsim::TransactionId> {
    std::size_t operator()(const dagsim::TransactionId& id) const noexcept {
        return dagsim::TransactionIdHash{}(id);
    }
};
