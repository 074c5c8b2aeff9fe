#include "perpetual/engine.hpp"

#include <stdexcept>

namespace perpetual {

std::string_view to_string(RecombineMode mode) {
  return mode == RecombineMode::Flip ? "flip" : "noflip";
}

RecombineMode parse_recombine_mode(std::string_view text) {
  if (text == "flip") return RecombineMode::Flip;
  if (text == "noflip") return RecombineMode::NoFlip;
  throw std::invalid_argument("unknown recombine mode '" + std::string(text) +
                              "' (expected flip or noflip)");
}

std::size_t Tableau::card_count() const {
  std::size_t n = 0;
  for (const auto& pile : piles) n += pile.size();
  return n;
}

std::string format_event(const TurnEvent& event) {
  switch (event.kind) {
    case TurnEvent::Kind::Dealt:
      return "deal " + format_hand(event.cards);
    case TurnEvent::Kind::Consolidated:
      return "move " + format_hand(event.cards) + " p" + std::to_string(event.from_pile) +
             "->p" + std::to_string(event.to_pile);
    case TurnEvent::Kind::Discarded:
      return "discard " + format_hand(event.cards);
  }
  return {};
}

GameState make_initial_state(Hand deck) {
  validate_deck(deck);
  GameState state;
  state.initial_size = deck.size();
  state.hand = std::move(deck);
  return state;
}

void deal_turn(GameState& state, std::vector<TurnEvent>* events) {
  if (state.cards_in_hand() < 4) {
    throw std::logic_error("deal_turn needs four cards in hand, have " +
                           std::to_string(state.cards_in_hand()));
  }
  auto& piles = state.tableau.piles;
  std::array<CardValue, 4> dealt;
  for (std::size_t i = 0; i < 4; ++i) {
    dealt[i] = state.hand[state.next_card + i];
    piles[i].push_back(dealt[i]);
  }
  state.next_card += 4;
  state.moves += 4;
  if (events) events->push_back({TurnEvent::Kind::Dealt, 0, 0, {dealt.begin(), dealt.end()}});

  if (dealt[0] == dealt[1] && dealt[1] == dealt[2] && dealt[2] == dealt[3]) {
    for (auto& pile : piles) pile.pop_back();
    state.discarded += 4;
    state.moves += 4;
    if (!state.first_discard_round) state.first_discard_round = state.round_index + 1;
    if (events) events->push_back({TurnEvent::Kind::Discarded, 0, 0, {dealt.begin(), dealt.end()}});
    return;
  }

  // A pile that receives a duplicate is the leftmost holder of its rank, so it
  // is never also a source: every source pile still has its dealt card on top.
  for (std::size_t j = 1; j < 4; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (dealt[i] != dealt[j]) continue;
      piles[j].pop_back();
      piles[i].push_back(dealt[j]);
      ++state.moves;
      if (events) {
        events->push_back({TurnEvent::Kind::Consolidated, static_cast<int>(j) + 1,
                           static_cast<int>(i) + 1, {dealt[j]}});
      }
      break;
    }
  }
}

Hand recombine(Tableau& tableau, RecombineMode mode) {
  Hand hand;
  recombine_into(tableau, mode, hand);
  return hand;
}

void recombine_into(Tableau& tableau, RecombineMode mode, Hand& hand) {
  hand.clear();
  hand.reserve(tableau.card_count());
  if (mode == RecombineMode::Flip) {
    // Face-down after turning over: bottom of pile 4 comes off first.
    for (auto it = tableau.piles.rbegin(); it != tableau.piles.rend(); ++it) {
      hand.insert(hand.end(), it->begin(), it->end());
    }
  } else {
    for (const auto& pile : tableau.piles) hand.insert(hand.end(), pile.rbegin(), pile.rend());
  }
  for (auto& pile : tableau.piles) pile.clear();
}

RoundReport play_round(GameState& state, RecombineMode mode, std::vector<TurnEvent>* events) {
  if (state.complete()) throw std::logic_error("play_round called on a completed game");
  const std::size_t discarded_before = state.discarded;
  while (state.cards_in_hand() > 0) deal_turn(state, events);
  recombine_into(state.tableau, mode, state.hand);
  state.next_card = 0;
  ++state.round_index;
  return {state.round_index, state.discarded - discarded_before};
}

}  // namespace perpetual
