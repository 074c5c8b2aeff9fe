#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perpetual/card.hpp"

namespace perpetual {

/// How the four stacked piles become the next round's hand. Piles are always
/// stacked 1 on 2 on 3 on 4; the modes differ only in deal orientation.
///   NoFlip: deal from the top of the combined stack (pile 1's top first).
///   Flip:   the stack is turned over (pile 4's bottom card first).
enum class RecombineMode { Flip, NoFlip };

std::string_view to_string(RecombineMode mode);
/// Accepts "flip" or "noflip"; throws std::invalid_argument otherwise.
RecombineMode parse_recombine_mode(std::string_view text);

/// Four positional pile slots, left to right. The back of each vector is the
/// pile's top card. A slot may be empty but always exists.
struct Tableau {
  std::array<std::vector<CardValue>, 4> piles;

  std::size_t card_count() const;
  bool empty() const { return card_count() == 0; }
};

struct TurnEvent {
  enum class Kind { Dealt, Consolidated, Discarded };

  Kind kind = Kind::Dealt;
  // 1-based pile numbers; only meaningful for Consolidated.
  int from_pile = 0;
  int to_pile = 0;
  std::vector<CardValue> cards;

  bool operator==(const TurnEvent&) const = default;
};

std::string format_event(const TurnEvent& event);

struct GameState {
  Hand hand;                 // this round's hand; cards before next_card are already dealt
  std::size_t next_card = 0;
  Tableau tableau;
  std::size_t discarded = 0;
  int round_index = 0;       // completed rounds
  std::uint64_t moves = 0;   // +1 per card dealt, consolidated or discarded
  std::optional<int> first_discard_round;
  std::size_t initial_size = 0;

  std::size_t cards_in_hand() const { return hand.size() - next_card; }
  bool complete() const { return cards_in_hand() == 0 && tableau.empty(); }
};

/// Validates the deck and builds the state before the first deal.
GameState make_initial_state(Hand deck);

/// Deals the next four hand cards onto piles 1..4, then applies the discard
/// rule or, failing that, a single left-to-right consolidation pass over the
/// four dealt cards. Newly exposed tops are never re-examined.
/// Throws std::logic_error if fewer than four cards remain in hand.
void deal_turn(GameState& state, std::vector<TurnEvent>* events = nullptr);

/// Stacks pile 1 on 2 on 3 on 4 and returns the resulting hand in deal order.
/// All slots are left empty. Costs no moves.
Hand recombine(Tableau& tableau, RecombineMode mode);
/// Same, writing into `out` (cleared first) to reuse its storage.
void recombine_into(Tableau& tableau, RecombineMode mode, Hand& out);

/// Result of one round: how many cards were discarded during it.
struct RoundReport {
  int round = 0;  // 1-based index of the round just played
  std::size_t discarded = 0;
};

/// Deals the whole hand turn by turn and recombines. On return state.hand is
/// the end-of-round sequence and round_index has advanced by one.
/// Throws std::logic_error on a completed game.
RoundReport play_round(GameState& state, RecombineMode mode,
                       std::vector<TurnEvent>* events = nullptr);

}  // namespace perpetual
