#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "perpetual/card.hpp"
#include "perpetual/game.hpp"
#include "perpetual/rng.hpp"

namespace perpetual {

/// A value sequence up to renaming of ranks, in restricted growth form: the
/// first card is label 0 and each new label is one more than the largest so
/// far. At most 13 labels, each used at most 4 times. Because the rules only
/// compare ranks for equality, one pattern stands for every relabeling.
struct Pattern {
  std::vector<std::uint8_t> symbols;

  /// Label k becomes rank k + 1.
  Hand to_hand() const;
  std::string to_tokens() const { return format_hand(to_hand()); }

  static Pattern canonical(std::span<const CardValue> values);
  /// True if `symbols` is a restricted growth string obeying both caps.
  bool valid() const;
  /// True if every label appears exactly four times.
  bool full_ranks() const;

  auto operator<=>(const Pattern&) const = default;
};

/// Which patterns a search covers. FullRanks keeps only patterns where every
/// label appears exactly four times: discards remove whole ranks, so these are
/// the only multisets a game from a full pack can ever hold.
enum class PatternFamily { All, FullRanks };

std::string_view to_string(PatternFamily family);
PatternFamily parse_pattern_family(std::string_view text);  // "all" or "full"

struct SearchOptions {
  PatternFamily family = PatternFamily::All;
  unsigned workers = 1;
  std::uint64_t seed = 0;  // sampling only
};

struct RoundMapResult {
  Hand hand;
  std::size_t discarded = 0;
};

/// One full round as a pure function of the value sequence. The empty
/// sequence maps to itself. Throws std::invalid_argument unless the length is
/// a multiple of four and no rank exceeds four copies.
RoundMapResult round_map_detail(std::span<const CardValue> seq, RecombineMode mode);
Hand round_map(std::span<const CardValue> seq, RecombineMode mode);

/// Number of patterns of `length`, saturating at UINT64_MAX.
std::uint64_t count_patterns(std::size_t length, PatternFamily family = PatternFamily::All);

/// Calls `visit` for every pattern of `length` in lexicographic order.
void for_each_pattern(std::size_t length, const std::function<void(const Pattern&)>& visit,
                      PatternFamily family = PatternFamily::All);

/// Same, restricted to patterns that start with `prefix` (itself a valid
/// restricted growth prefix).
void for_each_pattern_with_prefix(std::size_t length, const Pattern& prefix,
                                  const std::function<void(const Pattern&)>& visit,
                                  PatternFamily family = PatternFamily::All);

std::vector<Pattern> enumerate_patterns(std::size_t length,
                                        PatternFamily family = PatternFamily::All);

/// A uniformly random pattern of `length` from `family`.
Pattern sample_pattern(std::size_t length, SplitMix64& rng,
                       PatternFamily family = PatternFamily::All);

/// A pattern using some rank one to three times can never arise from a full
/// pack. Full-rank patterns might, but nothing here proves they do.
enum class Reachability { Unreachable, Unknown };

std::string_view to_string(Reachability reachability);

struct FixedPoint {
  Pattern pattern;
  RecombineMode mode = RecombineMode::Flip;
  Reachability reachability = Reachability::Unknown;
};

struct FixedPointSearch {
  RecombineMode mode = RecombineMode::Flip;
  PatternFamily family = PatternFamily::All;
  std::map<std::size_t, std::uint64_t> examined;  // length -> patterns checked
  std::vector<FixedPoint> found;                  // every entry passed round_map(p) == p
};

/// Exhaustively checks every pattern of length 4, 8, ..., max_length for a
/// no-discard round that returns the same sequence.
FixedPointSearch find_single_round_cycles(std::size_t max_length, RecombineMode mode,
                                          const SearchOptions& options = {});

/// Checks `samples` uniformly drawn patterns of one length.
FixedPointSearch random_single_round_search(std::size_t length, RecombineMode mode,
                                            std::uint64_t samples,
                                            const SearchOptions& options = {});

struct OrbitReport {
  Pattern pattern;
  Outcome outcome = Outcome::Completed;
  int pre_period = 0;    // cycled: round where the repeated sequence first appeared
  int cycle_length = 0;  // cycled only
  int rounds_to_resolution = 0;
};

/// Iterates round_map from `pattern` until it empties or repeats.
OrbitReport classify_orbit(const Pattern& pattern, RecombineMode mode);

struct Atlas {
  std::size_t length = 0;
  RecombineMode mode = RecombineMode::Flip;
  PatternFamily family = PatternFamily::All;
  bool exhaustive = false;
  std::uint64_t examined = 0;
  std::uint64_t completed = 0;
  std::map<int, std::uint64_t> cycle_lengths;  // cycle length -> patterns

  bool operator==(const Atlas&) const = default;
};

/// Classifies every pattern of `length` if there are at most `sample_budget`
/// of them, otherwise `sample_budget` uniform draws seeded by options.seed.
/// Individual reports are appended to `reports` when it is non-null.
Atlas orbit_atlas(std::size_t length, RecombineMode mode, std::uint64_t sample_budget,
                  const SearchOptions& options = {}, std::vector<OrbitReport>* reports = nullptr);

}  // namespace perpetual
