#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace perpetual {

/// A card's rank. Suits are never observed by the game, so a card is just
/// its value: Ace = 1 through King = 13.
class CardValue {
 public:
  static constexpr int kMinRank = 1;
  static constexpr int kMaxRank = 13;

  constexpr CardValue() = default;
  explicit CardValue(int rank);

  constexpr int rank() const { return rank_; }

  /// Single-character token: A 2 3 4 5 6 7 8 9 T J Q K.
  char token() const;
  static CardValue from_token(std::string_view token);

  friend constexpr auto operator<=>(CardValue, CardValue) = default;

 private:
  std::uint8_t rank_ = 1;
};

/// Ordered card values; index 0 is dealt first.
using Hand = std::vector<CardValue>;

Hand make_hand(std::initializer_list<int> ranks);

/// The 52-card value multiset (each rank four times) in rank order.
Hand standard_deck();

/// Parses whitespace-separated tokens ("A 2 T K"; "10" is accepted for T).
/// Throws std::invalid_argument on an unknown token.
Hand parse_hand(std::string_view text);

/// Space-separated tokens in dealt-first order; "-" for an empty hand.
std::string format_hand(std::span<const CardValue> hand);

/// Throws std::invalid_argument unless the sequence is a playable deck:
/// non-empty, a multiple of four long, no rank more than four times.
void validate_deck(std::span<const CardValue> deck);

}  // namespace perpetual
