#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "perpetual/engine.hpp"

namespace perpetual {

enum class Outcome { Completed, Cycled };

std::string_view to_string(Outcome outcome);

/// Terminal record of one game. Cycled games stop at the first round whose
/// end-of-round order repeats; `rounds` and `moves` include that round.
struct GameResult {
  std::uint64_t game_index = 0;
  Outcome outcome = Outcome::Completed;
  int rounds = 0;
  std::uint64_t moves = 0;
  std::optional<int> first_discard_round;
  std::optional<int> cycle_length;       // present iff Cycled
  std::optional<int> cycle_start_round;  // round where the repeated order first appeared

  bool operator==(const GameResult&) const = default;
};

std::string format_result(const GameResult& result);

struct GameOptions {
  RecombineMode mode = RecombineMode::Flip;
  bool prune_ledger = true;
};

/// Receives every round of a game as it is played.
class GameObserver {
 public:
  virtual ~GameObserver() = default;
  virtual void on_start(std::span<const CardValue> deck) = 0;
  /// `events` are this round's turn events in order; each turn starts with a
  /// Dealt event. `hand` is the recombined end-of-round sequence.
  virtual void on_round(int round, std::span<const TurnEvent> events,
                        std::span<const CardValue> hand) = 0;
  virtual void on_finish(const GameResult& result) = 0;
};

/// Writes the line-oriented replay trace.
class TextTrace final : public GameObserver {
 public:
  explicit TextTrace(std::ostream& out, bool verbose = false) : out_(out), verbose_(verbose) {}

  void on_start(std::span<const CardValue> deck) override;
  void on_round(int round, std::span<const TurnEvent> events,
                std::span<const CardValue> hand) override;
  void on_finish(const GameResult& result) override;

 private:
  std::ostream& out_;
  bool verbose_;
};

/// Plays a game until every card is discarded or an end-of-round order
/// repeats. Throws std::invalid_argument for an illegal deck.
GameResult play_game(Hand deck, const GameOptions& options = {},
                     GameObserver* observer = nullptr);

}  // namespace perpetual
