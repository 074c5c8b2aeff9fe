#include "perpetual/explore.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "perpetual/cycles.hpp"
#include "perpetual/engine.hpp"

namespace perpetual {
namespace {

constexpr int kMaxLabels = 13;
constexpr int kMaxCopies = 4;
constexpr std::size_t kPrefixDepth = 8;

void require_pattern_length(std::size_t length) {
  if (length % 4 != 0 || length > 52) {
    throw std::invalid_argument("pattern length must be a multiple of 4 no larger than 52, got " +
                                std::to_string(length));
  }
}

std::uint64_t sat_add(std::uint64_t x, std::uint64_t y) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  return x > kMax - y ? kMax : x + y;
}
std::uint64_t sat_mul(std::uint64_t x, std::uint64_t k) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  return k != 0 && x > kMax / k ? kMax : x * k;
}
double sat_add(double x, double y) { return x + y; }
double sat_mul(double x, std::uint64_t k) { return x * static_cast<double>(k); }

/// Number of ways to finish a pattern with `rem` cards still to place, given
/// how many labels are currently used once, twice, three and four times.
template <class T>
class CompletionTable {
 public:
  explicit CompletionTable(PatternFamily family) : full_(family == PatternFamily::FullRanks) {}

  T ways(int rem, int ones, int twos, int threes, int fours) {
    if (full_ && 3 * ones + 2 * twos + threes > rem) return T{0};
    if (rem == 0) return T{1};
    const auto key = static_cast<std::uint32_t>(rem << 16 | ones << 12 | twos << 8 | threes << 4 | fours);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    T total{0};
    if (ones + twos + threes + fours < kMaxLabels) {
      total = sat_add(total, ways(rem - 1, ones + 1, twos, threes, fours));
    }
    if (ones > 0) {
      total = sat_add(total, sat_mul(ways(rem - 1, ones - 1, twos + 1, threes, fours), ones));
    }
    if (twos > 0) {
      total = sat_add(total, sat_mul(ways(rem - 1, ones, twos - 1, threes + 1, fours), twos));
    }
    if (threes > 0) {
      total = sat_add(total, sat_mul(ways(rem - 1, ones, twos, threes - 1, fours + 1), threes));
    }
    memo_.emplace(key, total);
    return total;
  }

 private:
  bool full_;
  std::unordered_map<std::uint32_t, T> memo_;
};

struct LabelUse {
  std::array<std::uint8_t, kMaxLabels> copies{};
  int labels = 0;
  int deficit = 0;  // copies still missing for every used label to reach four

  void add(int label) {
    if (label == labels) {
      ++labels;
      deficit += kMaxCopies;
    }
    ++copies[label];
    --deficit;
  }
  void remove(int label) {
    --copies[label];
    ++deficit;
    if (copies[label] == 0 && label == labels - 1) {
      --labels;
      deficit -= kMaxCopies;
    }
  }
};

class Enumerator {
 public:
  Enumerator(std::size_t length, PatternFamily family,
             const std::function<void(const Pattern&)>& visit)
      : length_(length), full_(family == PatternFamily::FullRanks), visit_(visit) {}

  void run(Pattern& p, LabelUse& use) {
    if (full_ && static_cast<std::size_t>(use.deficit) > length_ - p.symbols.size()) return;
    if (p.symbols.size() == length_) {
      visit_(p);
      return;
    }
    const int limit = std::min(use.labels + 1, kMaxLabels);
    for (int k = 0; k < limit; ++k) {
      if (use.copies[k] == kMaxCopies) continue;
      p.symbols.push_back(static_cast<std::uint8_t>(k));
      use.add(k);
      run(p, use);
      use.remove(k);
      p.symbols.pop_back();
    }
  }

 private:
  std::size_t length_;
  bool full_;
  const std::function<void(const Pattern&)>& visit_;
};

/// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  workers = static_cast<unsigned>(std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1)));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

/// Prefixes of the family's patterns of `length`; together they partition it.
std::vector<Pattern> prefixes_for(std::size_t length, PatternFamily family) {
  const std::size_t depth = std::min(length, kPrefixDepth);
  std::vector<Pattern> out;
  Pattern p;
  LabelUse use;
  Enumerator(depth, PatternFamily::All, [&](const Pattern& q) {
    if (family == PatternFamily::FullRanks) {
      // Drop prefixes that leave too few cards to bring every label to four.
      LabelUse u;
      for (const auto s : q.symbols) u.add(s);
      if (static_cast<std::size_t>(u.deficit) > length - depth) return;
    }
    out.push_back(q);
  }).run(p, use);
  return out;
}

bool is_fixed_point(const Pattern& p, RecombineMode mode) {
  const Hand hand = p.to_hand();
  const RoundMapResult r = round_map_detail(hand, mode);
  return r.discarded == 0 && r.hand == hand;
}

FixedPoint make_fixed_point(Pattern p, RecombineMode mode) {
  const Reachability reach = p.full_ranks() ? Reachability::Unknown : Reachability::Unreachable;
  return {std::move(p), mode, reach};
}

}  // namespace

std::string_view to_string(PatternFamily family) {
  return family == PatternFamily::All ? "all" : "full";
}

PatternFamily parse_pattern_family(std::string_view text) {
  if (text == "all") return PatternFamily::All;
  if (text == "full") return PatternFamily::FullRanks;
  throw std::invalid_argument("unknown pattern family '" + std::string(text) +
                              "' (expected all or full)");
}

std::string_view to_string(Reachability reachability) {
  return reachability == Reachability::Unreachable ? "unreachable" : "unknown";
}

Hand Pattern::to_hand() const {
  Hand hand;
  hand.reserve(symbols.size());
  for (const std::uint8_t s : symbols) hand.emplace_back(s + 1);
  return hand;
}

Pattern Pattern::canonical(std::span<const CardValue> values) {
  std::array<int, CardValue::kMaxRank + 1> label;
  label.fill(-1);
  int next = 0;
  Pattern p;
  p.symbols.reserve(values.size());
  for (const CardValue c : values) {
    if (label[c.rank()] < 0) label[c.rank()] = next++;
    p.symbols.push_back(static_cast<std::uint8_t>(label[c.rank()]));
  }
  return p;
}

bool Pattern::valid() const {
  LabelUse use;
  for (const std::uint8_t s : symbols) {
    if (s > use.labels || s >= kMaxLabels || use.copies[s] == kMaxCopies) return false;
    use.add(s);
  }
  return true;
}

bool Pattern::full_ranks() const {
  std::array<int, kMaxLabels> copies{};
  for (const std::uint8_t s : symbols) {
    if (s >= kMaxLabels) return false;
    ++copies[s];
  }
  return std::all_of(copies.begin(), copies.end(), [](int c) { return c == 0 || c == 4; });
}

RoundMapResult round_map_detail(std::span<const CardValue> seq, RecombineMode mode) {
  if (seq.empty()) return {};
  GameState state = make_initial_state(Hand(seq.begin(), seq.end()));
  const RoundReport report = play_round(state, mode);
  return {std::move(state.hand), report.discarded};
}

Hand round_map(std::span<const CardValue> seq, RecombineMode mode) {
  return round_map_detail(seq, mode).hand;
}

std::uint64_t count_patterns(std::size_t length, PatternFamily family) {
  require_pattern_length(length);
  CompletionTable<std::uint64_t> table(family);
  return table.ways(static_cast<int>(length), 0, 0, 0, 0);
}

void for_each_pattern(std::size_t length, const std::function<void(const Pattern&)>& visit,
                      PatternFamily family) {
  for_each_pattern_with_prefix(length, Pattern{}, visit, family);
}

void for_each_pattern_with_prefix(std::size_t length, const Pattern& prefix,
                                  const std::function<void(const Pattern&)>& visit,
                                  PatternFamily family) {
  require_pattern_length(length);
  if (!prefix.valid() || prefix.symbols.size() > length) {
    throw std::invalid_argument("invalid pattern prefix");
  }
  LabelUse use;
  for (const std::uint8_t s : prefix.symbols) use.add(s);
  Pattern p = prefix;
  p.symbols.reserve(length);
  Enumerator(length, family, visit).run(p, use);
}

std::vector<Pattern> enumerate_patterns(std::size_t length, PatternFamily family) {
  std::vector<Pattern> out;
  for_each_pattern(length, [&](const Pattern& p) { out.push_back(p); }, family);
  return out;
}

Pattern sample_pattern(std::size_t length, SplitMix64& rng, PatternFamily family) {
  require_pattern_length(length);
  thread_local CompletionTable<double> all_table(PatternFamily::All);
  thread_local CompletionTable<double> full_table(PatternFamily::FullRanks);
  CompletionTable<double>& table = family == PatternFamily::All ? all_table : full_table;

  LabelUse use;
  std::array<int, kMaxCopies + 1> by_copies{};  // labels currently used k times
  Pattern p;
  p.symbols.reserve(length);
  for (std::size_t placed = 0; placed < length; ++placed) {
    const int rem = static_cast<int>(length - placed) - 1;
    const int ones = by_copies[1], twos = by_copies[2], threes = by_copies[3],
              fours = by_copies[4];
    // Class 0 is a fresh label; class k reuses a label currently used k times.
    std::array<double, 4> weight{};
    if (use.labels < kMaxLabels) weight[0] = table.ways(rem, ones + 1, twos, threes, fours);
    if (ones) weight[1] = ones * table.ways(rem, ones - 1, twos + 1, threes, fours);
    if (twos) weight[2] = twos * table.ways(rem, ones, twos - 1, threes + 1, fours);
    if (threes) weight[3] = threes * table.ways(rem, ones, twos, threes - 1, fours + 1);

    double total = 0;
    for (const double w : weight) total += w;
    double pick = rng.unit() * total;
    int cls = -1;
    for (int k = 0; k < 4; ++k) {
      if (weight[k] == 0) continue;
      cls = k;  // the last viable class absorbs rounding drift
      if (pick < weight[k]) break;
      pick -= weight[k];
    }
    if (cls < 0) throw std::logic_error("no completion for pattern prefix");

    int label = use.labels;
    if (cls > 0) {
      auto nth = rng.below(static_cast<std::uint64_t>(by_copies[cls]));
      for (int k = 0; k < use.labels; ++k) {
        if (use.copies[k] == cls && nth-- == 0) {
          label = k;
          break;
        }
      }
      --by_copies[cls];
    }
    use.add(label);
    ++by_copies[use.copies[label]];
    p.symbols.push_back(static_cast<std::uint8_t>(label));
  }
  return p;
}

FixedPointSearch find_single_round_cycles(std::size_t max_length, RecombineMode mode,
                                          const SearchOptions& options) {
  require_pattern_length(max_length);
  FixedPointSearch search;
  search.mode = mode;
  search.family = options.family;
  for (std::size_t length = 4; length <= max_length; length += 4) {
    const std::vector<Pattern> prefixes = prefixes_for(length, options.family);
    std::vector<std::vector<Pattern>> hits(prefixes.size());
    std::vector<std::uint64_t> checked(prefixes.size(), 0);
    parallel_for(prefixes.size(), options.workers, [&](std::size_t i) {
      for_each_pattern_with_prefix(
          length, prefixes[i],
          [&](const Pattern& p) {
            ++checked[i];
            if (is_fixed_point(p, mode)) hits[i].push_back(p);
          },
          options.family);
    });
    std::uint64_t& examined = search.examined[length];
    for (std::size_t i = 0; i < prefixes.size(); ++i) {
      examined += checked[i];
      for (Pattern& p : hits[i]) search.found.push_back(make_fixed_point(std::move(p), mode));
    }
  }
  return search;
}

FixedPointSearch random_single_round_search(std::size_t length, RecombineMode mode,
                                            std::uint64_t samples, const SearchOptions& options) {
  require_pattern_length(length);
  FixedPointSearch search;
  search.mode = mode;
  search.family = options.family;
  search.examined[length] = samples;
  std::vector<Pattern> hits;
  for (std::uint64_t i = 0; i < samples; ++i) {
    SplitMix64 rng(derive_seed(options.seed, i));
    Pattern p = sample_pattern(length, rng, options.family);
    if (is_fixed_point(p, mode)) hits.push_back(std::move(p));
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  for (Pattern& p : hits) search.found.push_back(make_fixed_point(std::move(p), mode));
  return search;
}

OrbitReport classify_orbit(const Pattern& pattern, RecombineMode mode) {
  OrbitReport report{pattern};
  if (pattern.symbols.empty()) return report;
  // Same iteration as round_map, keeping one state so buffers are reused.
  GameState state = make_initial_state(pattern.to_hand());
  SeenLedger ledger;
  ledger.record_and_check(CanonicalState(state.hand), 0);
  while (true) {
    const RoundReport round = play_round(state, mode);
    report.rounds_to_resolution = round.round;
    if (state.complete()) break;
    if (round.discarded > 0) ledger.prune_on_discard(state.hand.size());
    if (auto cycle = ledger.record_and_check(CanonicalState(state.hand), round.round)) {
      report.outcome = Outcome::Cycled;
      report.pre_period = cycle->first_seen_round;
      report.cycle_length = cycle->cycle_length;
      return report;
    }
  }
  report.outcome = Outcome::Completed;
  return report;
}

Atlas orbit_atlas(std::size_t length, RecombineMode mode, std::uint64_t sample_budget,
                  const SearchOptions& options, std::vector<OrbitReport>* reports) {
  require_pattern_length(length);
  Atlas atlas;
  atlas.length = length;
  atlas.mode = mode;
  atlas.family = options.family;
  atlas.exhaustive = count_patterns(length, options.family) <= sample_budget;

  auto tally = [](Atlas& into, const OrbitReport& r) {
    ++into.examined;
    if (r.outcome == Outcome::Completed) {
      ++into.completed;
    } else {
      ++into.cycle_lengths[r.cycle_length];
    }
  };

  // Work is split into ordered chunks and merged in chunk order.
  std::vector<Atlas> partial;
  std::vector<std::vector<OrbitReport>> partial_reports;
  if (atlas.exhaustive) {
    const std::vector<Pattern> prefixes = prefixes_for(length, options.family);
    partial.resize(prefixes.size());
    partial_reports.resize(prefixes.size());
    parallel_for(prefixes.size(), options.workers, [&](std::size_t i) {
      for_each_pattern_with_prefix(
          length, prefixes[i],
          [&](const Pattern& p) {
            OrbitReport r = classify_orbit(p, mode);
            tally(partial[i], r);
            if (reports) partial_reports[i].push_back(std::move(r));
          },
          options.family);
    });
  } else {
    constexpr std::uint64_t kChunk = 1024;
    const std::size_t chunks = (sample_budget + kChunk - 1) / kChunk;
    partial.resize(chunks);
    partial_reports.resize(chunks);
    parallel_for(chunks, options.workers, [&](std::size_t c) {
      const std::uint64_t end = std::min<std::uint64_t>(sample_budget, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) {
        SplitMix64 rng(derive_seed(options.seed, i));
        OrbitReport r = classify_orbit(sample_pattern(length, rng, options.family), mode);
        tally(partial[c], r);
        if (reports) partial_reports[c].push_back(std::move(r));
      }
    });
  }
  for (std::size_t i = 0; i < partial.size(); ++i) {
    atlas.examined += partial[i].examined;
    atlas.completed += partial[i].completed;
    for (const auto& [len, n] : partial[i].cycle_lengths) atlas.cycle_lengths[len] += n;
    if (reports) {
      std::move(partial_reports[i].begin(), partial_reports[i].end(), std::back_inserter(*reports));
    }
  }
  return atlas;
}

}  // namespace perpetual
