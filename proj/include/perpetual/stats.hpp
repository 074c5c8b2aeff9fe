#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "perpetual/game.hpp"

namespace perpetual {

inline constexpr const char* kVersion = "1.0.0";

/// Everything needed to reproduce a run; echoed into every output.
struct RunConfig {
  std::uint64_t master_seed = 2009;
  RecombineMode mode = RecombineMode::Flip;
  std::uint64_t batches = 10;
  double alpha = 0.05;
  std::uint64_t moves_bin_width = 250;
  std::string generator = "splitmix64";
};

/// Integer accumulators over a set of games. Merging is exact and associative.
struct Tally {
  std::uint64_t games = 0;
  std::uint64_t completed = 0;
  std::uint64_t rounds_sum = 0;
  std::uint64_t moves_sum = 0;
  std::uint64_t first_discard_sum = 0;
  std::uint64_t first_discard_count = 0;

  static Tally of(std::span<const GameResult> results);
  Tally& operator+=(const Tally& other);
  bool operator==(const Tally&) const = default;
};

struct ConfidenceInterval {
  double mean_pct = 0;
  double halfwidth_pct = 0;
};

/// Two-sided quantile t_{1-alpha/2} of Student's t with `dof` degrees of freedom.
double student_t_critical(double alpha, std::uint64_t dof);

/// Completion percentage over equal-sized batches with a Student-t interval on
/// the batch counts: t_{1-alpha/2, n-1} * s / sqrt(n), as a percent of the
/// batch size. Throws std::invalid_argument for fewer than two batches, a
/// count above batch_size, or alpha outside (0, 1).
ConfidenceInterval completion_ci(std::span<const std::uint64_t> batch_completed,
                                 std::uint64_t batch_size, double alpha);

struct Summary {
  std::uint64_t games = 0;
  std::uint64_t completed = 0;
  std::uint64_t cycled = 0;
  double completion_pct = 0;
  std::optional<double> ci_halfwidth_pct;  // absent with a single batch
  double mean_rounds = 0;
  double mean_first_discard_round = 0;     // over games that discarded
  std::uint64_t first_discard_excluded = 0;
  double mean_moves = 0;
  std::vector<std::uint64_t> batch_completed;
  RunConfig config;
};

/// Batch b holds game indices [b * games/batches, (b+1) * games/batches).
/// Throws std::invalid_argument if results are empty, batches does not divide
/// their number, or a game index is out of range.
Summary summarize(std::span<const GameResult> results, const RunConfig& config);

/// One second per card moved plus five seconds per recombination.
double estimate_play_time(double mean_moves, double mean_rounds);
inline double estimate_play_time(const Summary& s) {
  return estimate_play_time(s.mean_moves, s.mean_rounds);
}

struct Histogram {
  std::string name;
  std::uint64_t bin_width = 1;
  std::map<std::uint64_t, std::uint64_t> bins;  // bin lower bound -> count

  void add(std::uint64_t value);
  std::uint64_t total() const;
};

struct Histograms {
  Histogram rounds;
  Histogram moves;
  Histogram cycle_length;  // cycled games only
};

Histograms build_histograms(std::span<const GameResult> results, std::uint64_t moves_bin_width);

/// summary.json with fixed precision (2 places for percentages, 1 for means)
/// and stable key order.
std::string summary_json(const Summary& summary);

/// `bin,count` then one row per non-empty bin, ascending.
std::string histogram_csv(const Histogram& histogram);

/// Raw per-game records, one line each, with a commented config header.
std::string results_file(std::span<const GameResult> results, const RunConfig& config);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ResultsFile {
  RunConfig config;
  std::vector<GameResult> results;
};

/// Inverse of results_file. Throws ParseError naming the offending line.
ResultsFile parse_results_file(std::istream& in);

}  // namespace perpetual
