#include "perpetual/cycles.hpp"

#include <stdexcept>

namespace perpetual {

CanonicalState::CanonicalState(std::span<const CardValue> values) {
  key_.reserve(values.size());
  for (const CardValue c : values) key_.push_back(static_cast<char>(c.rank()));
}

std::optional<CycleReport> SeenLedger::record_and_check(const CanonicalState& state,
                                                        int round_index) {
  if (round_index <= last_round_) {
    throw std::logic_error("ledger round indices must strictly increase");
  }
  last_round_ = round_index;
  auto [it, inserted] = entries_.try_emplace(state, round_index);
  if (inserted) return std::nullopt;
  return CycleReport{it->second, round_index - it->second};
}

void SeenLedger::prune_on_discard(std::size_t current_size) {
  std::erase_if(entries_, [&](const auto& entry) { return entry.first.size() > current_size; });
}

}  // namespace perpetual
