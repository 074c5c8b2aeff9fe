#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "perpetual/card.hpp"

namespace perpetual {

/// An end-of-round hand, compared by its full value sequence. The hash only
/// speeds up lookup; equality always checks every card.
class CanonicalState {
 public:
  explicit CanonicalState(std::span<const CardValue> values);

  std::size_t size() const { return key_.size(); }
  const std::string& key() const { return key_; }

  bool operator==(const CanonicalState&) const = default;

 private:
  std::string key_;  // one byte per card: its rank
};

struct CanonicalStateHash {
  std::size_t operator()(const CanonicalState& s) const noexcept {
    return std::hash<std::string>{}(s.key());
  }
};

struct CycleReport {
  int first_seen_round = 0;
  int cycle_length = 0;

  bool operator==(const CycleReport&) const = default;
};

/// Every distinct state seen so far in one game, keyed to the round that
/// produced it. Round 0 is the shuffled pack before any dealing.
class SeenLedger {
 public:
  SeenLedger() { entries_.reserve(64); }

  /// Returns the report if `state` was already recorded; otherwise stores it.
  /// Round indices must strictly increase (std::logic_error otherwise).
  std::optional<CycleReport> record_and_check(const CanonicalState& state, int round_index);

  /// Drops entries longer than `current_size`. Hand sizes never grow during a
  /// game, so those states cannot recur.
  void prune_on_discard(std::size_t current_size);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::unordered_map<CanonicalState, int, CanonicalStateHash> entries_;
  int last_round_ = -1;
};

}  // namespace perpetual
