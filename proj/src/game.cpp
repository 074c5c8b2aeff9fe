#include "perpetual/game.hpp"

#include <ostream>

#include "perpetual/cycles.hpp"

namespace perpetual {

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Completed ? "completed" : "cycled";
}

std::string format_result(const GameResult& r) {
  std::string out = "result: " + std::string(to_string(r.outcome)) +
                    " rounds=" + std::to_string(r.rounds) + " moves=" + std::to_string(r.moves);
  out += " first_discard_round=";
  out += r.first_discard_round ? std::to_string(*r.first_discard_round) : "none";
  if (r.cycle_length) {
    out += " cycle_length=" + std::to_string(*r.cycle_length) +
           " cycle_start_round=" + std::to_string(r.cycle_start_round.value_or(0));
  }
  return out;
}

void TextTrace::on_start(std::span<const CardValue> deck) {
  out_ << "start: " << format_hand(deck) << '\n';
}

void TextTrace::on_round(int round, std::span<const TurnEvent> events,
                         std::span<const CardValue> hand) {
  int turn = 0;
  for (const TurnEvent& e : events) {
    if (e.kind == TurnEvent::Kind::Dealt) ++turn;
    out_ << 'r' << round << " t" << turn << ' ' << format_event(e) << '\n';
  }
  out_ << 'r' << round << " end: " << format_hand(hand) << '\n';
  if (verbose_) out_ << 'r' << round << " cards: " << hand.size() << '\n';
}

void TextTrace::on_finish(const GameResult& result) { out_ << format_result(result) << '\n'; }

GameResult play_game(Hand deck, const GameOptions& options, GameObserver* observer) {
  GameState state = make_initial_state(std::move(deck));
  if (observer) observer->on_start(state.hand);

  SeenLedger ledger;
  ledger.record_and_check(CanonicalState(state.hand), 0);

  std::vector<TurnEvent> events;
  GameResult result;
  while (true) {
    events.clear();
    const RoundReport round = play_round(state, options.mode, observer ? &events : nullptr);
    if (observer) observer->on_round(round.round, events, state.hand);

    result.rounds = round.round;
    result.moves = state.moves;
    result.first_discard_round = state.first_discard_round;
    if (state.complete()) {
      result.outcome = Outcome::Completed;
      break;
    }
    if (round.discarded > 0 && options.prune_ledger) ledger.prune_on_discard(state.hand.size());
    if (auto cycle = ledger.record_and_check(CanonicalState(state.hand), round.round)) {
      result.outcome = Outcome::Cycled;
      result.cycle_length = cycle->cycle_length;
      result.cycle_start_round = cycle->first_seen_round;
      break;
    }
  }
  if (observer) observer->on_finish(result);
  return result;
}

}  // namespace perpetual
