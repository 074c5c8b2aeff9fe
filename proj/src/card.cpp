#include "perpetual/card.hpp"

#include <array>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace perpetual {
namespace {

constexpr std::string_view kTokens = "A23456789TJQK";

}  // namespace

CardValue::CardValue(int rank) {
  if (rank < kMinRank || rank > kMaxRank) {
    throw std::invalid_argument("card rank out of range: " + std::to_string(rank));
  }
  rank_ = static_cast<std::uint8_t>(rank);
}

char CardValue::token() const { return kTokens[rank_ - 1]; }

CardValue CardValue::from_token(std::string_view token) {
  if (token == "10") return CardValue(10);
  if (token.size() == 1) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(token[0])));
    if (auto pos = kTokens.find(c); pos != std::string_view::npos) {
      return CardValue(static_cast<int>(pos) + 1);
    }
  }
  throw std::invalid_argument("unknown card token '" + std::string(token) + "'");
}

Hand make_hand(std::initializer_list<int> ranks) {
  Hand hand;
  hand.reserve(ranks.size());
  for (int r : ranks) hand.emplace_back(r);
  return hand;
}

Hand standard_deck() {
  Hand deck;
  deck.reserve(52);
  for (int r = CardValue::kMinRank; r <= CardValue::kMaxRank; ++r) {
    for (int suit = 0; suit < 4; ++suit) deck.emplace_back(r);
  }
  return deck;
}

Hand parse_hand(std::string_view text) {
  Hand hand;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) hand.push_back(CardValue::from_token(tok));
  return hand;
}

std::string format_hand(std::span<const CardValue> hand) {
  if (hand.empty()) return "-";
  std::string out;
  out.reserve(hand.size() * 2);
  for (const CardValue c : hand) {
    if (!out.empty()) out.push_back(' ');
    out.push_back(c.token());
  }
  return out;
}

void validate_deck(std::span<const CardValue> deck) {
  if (deck.empty()) throw std::invalid_argument("deck is empty");
  if (deck.size() % 4 != 0) {
    throw std::invalid_argument("deck size " + std::to_string(deck.size()) +
                                " is not a multiple of 4");
  }
  std::array<int, CardValue::kMaxRank + 1> seen{};
  for (const CardValue c : deck) {
    if (++seen[c.rank()] > 4) {
      throw std::invalid_argument(std::string("rank ") + c.token() +
                                  " appears more than 4 times");
    }
  }
}

}  // namespace perpetual
