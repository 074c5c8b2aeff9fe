#pragma once

#include <cstdint>
#include <vector>

#include "perpetual/card.hpp"
#include "perpetual/game.hpp"
#include "perpetual/rng.hpp"

namespace perpetual {

struct ExperimentConfig {
  std::uint64_t games = 10000;
  std::uint64_t batches = 10;
  std::uint64_t master_seed = 2009;
  RecombineMode mode = RecombineMode::Flip;
  bool prune_ledger = true;

  std::uint64_t batch_size() const { return games / batches; }
  /// Throws std::invalid_argument unless games >= 1, batches >= 1 and
  /// batches divides games.
  void validate() const;
};

/// In-place Fisher-Yates shuffle.
void shuffle(Hand& cards, SplitMix64& rng);

/// The 52-card deck for one game, a pure function of (master seed, index).
Hand shuffled_deck(std::uint64_t master_seed, std::uint64_t game_index);

/// Plays every game of the experiment. Results are ordered by game index and
/// identical for any `workers` (0 = hardware concurrency).
std::vector<GameResult> run_experiment(const ExperimentConfig& config, unsigned workers = 0);

}  // namespace perpetual
