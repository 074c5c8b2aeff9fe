#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "perpetual/engine.hpp"
#include "perpetual/game.hpp"
#include "test_support.hpp"

using namespace perpetual;
using testing::from_ints;
using testing::to_ints;

namespace {

GameState state_with_hand(const char* tokens) { return make_initial_state(parse_hand(tokens)); }

std::vector<int> pile(const GameState& s, int index) { return to_ints(s.tableau.piles[index]); }

}  // namespace

TEST_CASE("deal_turn moves a duplicate onto the leftmost matching pile") {
  // Tops after the deal read Ace, 3, Queen, 3: the 3 on pile 4 joins pile 2.
  GameState s = state_with_hand("A 3 Q 3");
  s.tableau.piles[3] = parse_hand("9");
  std::vector<TurnEvent> events;
  deal_turn(s, &events);

  CHECK(pile(s, 0) == std::vector{1});
  CHECK(pile(s, 1) == std::vector{3, 3});
  CHECK(pile(s, 2) == std::vector{12});
  CHECK(pile(s, 3) == std::vector{9});  // previous top exposed again
  CHECK(s.moves == 5);
  REQUIRE(events.size() == 2);
  CHECK(events[0].kind == TurnEvent::Kind::Dealt);
  CHECK(events[1] == TurnEvent{TurnEvent::Kind::Consolidated, 4, 2, parse_hand("3")});
  CHECK(format_event(events[1]) == "move 3 p4->p2");
}

TEST_CASE("deal_turn discards four of a kind") {
  GameState s = state_with_hand("7 7 7 7");
  std::vector<TurnEvent> events;
  deal_turn(s, &events);
  CHECK(s.tableau.empty());
  CHECK(s.discarded == 4);
  CHECK(s.moves == 8);
  CHECK(s.first_discard_round == 1);
  REQUIRE(events.size() == 2);
  CHECK(events[1].kind == TurnEvent::Kind::Discarded);
  CHECK(events[1].cards == parse_hand("7 7 7 7"));
}

TEST_CASE("deal_turn consolidates two ranks in one pass") {
  GameState s = state_with_hand("5 9 5 9");
  deal_turn(s);
  CHECK(pile(s, 0) == std::vector{5, 5});
  CHECK(pile(s, 1) == std::vector{9, 9});
  CHECK(pile(s, 2).empty());
  CHECK(pile(s, 3).empty());
  CHECK(s.moves == 6);

  // Three of a kind: both duplicates go to pile 1, later one on top.
  GameState t = state_with_hand("4 4 K 4");
  deal_turn(t);
  CHECK(pile(t, 0) == std::vector{4, 4, 4});
  CHECK(pile(t, 2) == std::vector{13});
  CHECK(t.moves == 6);
}

TEST_CASE("newly exposed tops are not re-examined") {
  GameState s = state_with_hand("A 2 3 2");
  s.tableau.piles[3] = parse_hand("A");
  deal_turn(s);
  // Pile 4 shows an Ace again after its 2 moved, but stays put.
  CHECK(pile(s, 0) == std::vector{1});
  CHECK(pile(s, 3) == std::vector{1});
  CHECK(s.moves == 5);
}

TEST_CASE("deal_turn needs four cards") {
  GameState s = state_with_hand("A 2 3 4");
  deal_turn(s);
  CHECK_THROWS_AS(deal_turn(s), std::logic_error);
}

TEST_CASE("recombine stacks pile 1 on top and respects orientation") {
  Tableau t;
  t.piles = {parse_hand("A"), parse_hand("2"), parse_hand("3"), parse_hand("4")};
  Tableau u = t;
  CHECK(format_hand(recombine(t, RecombineMode::NoFlip)) == "A 2 3 4");
  CHECK(format_hand(recombine(u, RecombineMode::Flip)) == "4 3 2 A");
  CHECK(t.empty());

  Tableau v;
  v.piles[0] = parse_hand("Q K");  // K on top
  v.piles[2] = parse_hand("2");
  CHECK(format_hand(recombine(v, RecombineMode::NoFlip)) == "K Q 2");
  CHECK(recombine(v, RecombineMode::Flip).empty());
}

TEST_CASE("play_round") {
  SUBCASE("a lone quad completes the game") {
    GameState s = state_with_hand("8 8 8 8");
    const RoundReport r = play_round(s, RecombineMode::Flip);
    CHECK(r.round == 1);
    CHECK(r.discarded == 4);
    CHECK(s.complete());
    CHECK(s.moves == 8);
    CHECK_THROWS_AS(play_round(s, RecombineMode::Flip), std::logic_error);
  }
  SUBCASE("alternating pairs") {
    for (auto [mode, expected] : {std::pair{RecombineMode::NoFlip, "A A A A 2 2 2 2"},
                                  std::pair{RecombineMode::Flip, "2 2 2 2 A A A A"}}) {
      GameState s = state_with_hand("A 2 A 2 A 2 A 2");
      const RoundReport r = play_round(s, mode);
      CHECK(r.discarded == 0);
      CHECK(format_hand(s.hand) == expected);
      CHECK(s.moves == 12);
      CHECK(to_ints(s.hand) == refsim::play_one_round({1, 2, 1, 2, 1, 2, 1, 2},
                                                      mode == RecombineMode::Flip).pack);
    }
  }
  SUBCASE("fixture deck, first round") {
    GameState s = make_initial_state(testing::fixture_deck());
    play_round(s, RecombineMode::Flip);
    // Frozen from an independent prototype of the rules.
    CHECK(format_hand(s.hand) ==
          "A 2 8 Q 4 T Q 5 9 7 T 4 J Q 2 2 K 9 K 2 6 6 7 K 9 9 8 T 5 8 A A A 5 8 7 7 T 6 6 4 3 "
          "3 J 3 3 Q J J 5 4 K");
    CHECK(s.moves == 58);
    CHECK(s.discarded == 0);
  }
}

TEST_CASE("play_game on small decks") {
  for (const RecombineMode mode : {RecombineMode::Flip, RecombineMode::NoFlip}) {
    CAPTURE(to_string(mode));
    const GameResult quad = play_game(parse_hand("8 8 8 8"), {mode});
    CHECK(quad == GameResult{0, Outcome::Completed, 1, 8, 1, std::nullopt, std::nullopt});

    const GameResult pairs = play_game(parse_hand("A 2 A 2 A 2 A 2"), {mode});
    CHECK(pairs == GameResult{0, Outcome::Completed, 2, 28, 2, std::nullopt, std::nullopt});

    // Returns to the shuffled order itself after two rounds.
    const GameResult back = play_game(parse_hand("A A A 2 2 2 2 A"), {mode});
    CHECK(back == GameResult{0, Outcome::Cycled, 2, 24, std::nullopt, 2, 0});

    const GameResult two = play_game(parse_hand("A A 2 A 2 A 2 2"), {mode});
    CHECK(two == GameResult{0, Outcome::Cycled, 3, 36, std::nullopt, 2, 1});
  }
}

TEST_CASE("fixture deck regression") {
  const Hand deck = testing::fixture_deck();
  REQUIRE(deck.size() == 52);
  const GameResult flip = play_game(deck, {RecombineMode::Flip});
  CHECK(flip == GameResult{0, Outcome::Completed, 77, 3378, 6, std::nullopt, std::nullopt});

  const GameResult noflip = play_game(deck, {RecombineMode::NoFlip});
  CHECK(noflip.outcome == Outcome::Cycled);
  CHECK(noflip.rounds == 215);
  CHECK(noflip.moves == 10035);
  CHECK(noflip.first_discard_round == 32);
  CHECK(noflip.cycle_length == 2);
  CHECK(testing::matches_reference(noflip, refsim::play(to_ints(deck), false)));
}

TEST_CASE("play_game rejects illegal decks") {
  CHECK_THROWS_AS(play_game(Hand{}), std::invalid_argument);
  CHECK_THROWS_AS(play_game(parse_hand("A 2 3")), std::invalid_argument);
  CHECK_THROWS_AS(play_game(parse_hand("A A A A A 2 2 2")), std::invalid_argument);
}

TEST_CASE("text trace of a forced deck") {
  std::ostringstream out;
  TextTrace trace(out);
  play_game(parse_hand("8 8 8 8"), {}, &trace);
  CHECK(out.str() ==
        "start: 8 8 8 8\n"
        "r1 t1 deal 8 8 8 8\n"
        "r1 t1 discard 8 8 8 8\n"
        "r1 end: -\n"
        "result: completed rounds=1 moves=8 first_discard_round=1\n");
}

TEST_CASE("per-turn invariants on random decks") {
  std::mt19937_64 rng(7);
  for (int game = 0; game < 200; ++game) {
    const Hand deck = game % 2 ? testing::random_deck(rng) : testing::random_partial_deck(rng);
    const RecombineMode mode = game % 4 < 2 ? RecombineMode::Flip : RecombineMode::NoFlip;
    GameState s = make_initial_state(deck);
    std::size_t last_size = deck.size();
    std::optional<int> first_discard;
    for (int round = 0; round < 60 && !s.complete(); ++round) {
      while (s.cards_in_hand() > 0) {
        std::vector<TurnEvent> events;
        deal_turn(s, &events);
        REQUIRE(s.cards_in_hand() + s.tableau.card_count() + s.discarded == deck.size());
        REQUIRE(s.discarded % 4 == 0);
        for (const TurnEvent& e : events) {
          if (e.kind != TurnEvent::Kind::Discarded) continue;
          REQUIRE(e.cards.size() == 4);
          REQUIRE(std::all_of(e.cards.begin(), e.cards.end(),
                              [&](CardValue c) { return c == e.cards[0]; }));
        }
        if (first_discard) REQUIRE(s.first_discard_round == first_discard);
        first_discard = s.first_discard_round;
      }
      s.hand = recombine(s.tableau, mode);
      s.next_card = 0;
      ++s.round_index;
      REQUIRE(s.hand.size() % 4 == 0);
      REQUIRE(s.hand.size() <= last_size);
      last_size = s.hand.size();
    }
  }
}

TEST_CASE("rounds are deterministic and relabeling-equivariant") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Hand deck = testing::random_deck(rng);
    const auto map = testing::random_relabeling(rng);
    const RecombineMode mode = i % 2 ? RecombineMode::Flip : RecombineMode::NoFlip;

    GameState a = make_initial_state(deck), b = make_initial_state(deck);
    GameState c = make_initial_state(testing::relabel(deck, map));
    std::vector<TurnEvent> ea, eb;
    play_round(a, mode, &ea);
    play_round(b, mode, &eb);
    play_round(c, mode);
    REQUIRE(a.hand == b.hand);
    REQUIRE(ea == eb);
    REQUIRE(c.hand == testing::relabel(a.hand, map));
    REQUIRE(c.moves == a.moves);
    REQUIRE(c.discarded == a.discarded);
  }
}

TEST_CASE("engine agrees with the naive reference simulator") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Hand deck = i % 3 ? testing::random_deck(rng) : testing::random_partial_deck(rng);
    const bool flip = i % 2 == 0;
    const GameResult r = play_game(deck, {flip ? RecombineMode::Flip : RecombineMode::NoFlip});
    REQUIRE(testing::matches_reference(r, refsim::play(to_ints(deck), flip)));
  }
}

TEST_CASE("engine agrees with the reference on short ragged decks") {
  // Ranks with fewer than four copies never leave play, so orbits get long
  // quickly; sixteen cards keeps the reference's linear history cheap.
  std::mt19937_64 rng(77);
  for (int i = 0; i < 400; ++i) {
    Hand deck = testing::random_deck(rng);
    deck.resize(4 * std::uniform_int_distribution<std::size_t>(1, 4)(rng));
    const bool flip = i % 2 == 0;
    const GameResult r = play_game(deck, {flip ? RecombineMode::Flip : RecombineMode::NoFlip});
    REQUIRE(testing::matches_reference(r, refsim::play(to_ints(deck), flip)));
  }
}
