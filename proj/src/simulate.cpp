#include "perpetual/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace perpetual {

void ExperimentConfig::validate() const {
  if (games == 0) throw std::invalid_argument("games must be at least 1");
  if (batches == 0) throw std::invalid_argument("batches must be at least 1");
  if (games % batches != 0) {
    throw std::invalid_argument("batches (" + std::to_string(batches) +
                                ") must divide games (" + std::to_string(games) + ")");
  }
}

void shuffle(Hand& cards, SplitMix64& rng) {
  for (std::size_t i = cards.size(); i > 1; --i) {
    std::swap(cards[i - 1], cards[rng.below(i)]);
  }
}

Hand shuffled_deck(std::uint64_t master_seed, std::uint64_t game_index) {
  SplitMix64 rng(derive_seed(master_seed, game_index));
  Hand deck = standard_deck();
  shuffle(deck, rng);
  return deck;
}

std::vector<GameResult> run_experiment(const ExperimentConfig& config, unsigned workers) {
  config.validate();
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, config.games));

  const GameOptions options{config.mode, config.prune_ledger};
  std::vector<GameResult> results(config.games);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    try {
      for (std::uint64_t i = next++; i < config.games; i = next++) {
        GameResult r = play_game(shuffled_deck(config.master_seed, i), options);
        r.game_index = i;
        results[i] = std::move(r);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = config.games;
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace perpetual
