#include "perpetual/stats.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <charconv>
#include <cmath>
#include "json.hpp"
#include <sstream>

namespace perpetual {
namespace {

double round_to(double value, int places) {
  const double scale = std::pow(10.0, places);
  return std::round(value * scale) / scale;
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Tally Tally::of(std::span<const GameResult> results) {
  Tally t;
  for (const GameResult& r : results) {
    ++t.games;
    if (r.outcome == Outcome::Completed) ++t.completed;
    t.rounds_sum += static_cast<std::uint64_t>(r.rounds);
    t.moves_sum += r.moves;
    if (r.first_discard_round) {
      t.first_discard_sum += static_cast<std::uint64_t>(*r.first_discard_round);
      ++t.first_discard_count;
    }
  }
  return t;
}

Tally& Tally::operator+=(const Tally& o) {
  games += o.games;
  completed += o.completed;
  rounds_sum += o.rounds_sum;
  moves_sum += o.moves_sum;
  first_discard_sum += o.first_discard_sum;
  first_discard_count += o.first_discard_count;
  return *this;
}

double student_t_critical(double alpha, std::uint64_t dof) {
  if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (dof == 0) throw std::invalid_argument("Student t needs at least one degree of freedom");
  const boost::math::students_t dist(static_cast<double>(dof));
  return boost::math::quantile(dist, 1.0 - alpha / 2.0);
}

ConfidenceInterval completion_ci(std::span<const std::uint64_t> batch_completed,
                                 std::uint64_t batch_size, double alpha) {
  const std::uint64_t n = batch_completed.size();
  if (n < 2) throw std::invalid_argument("confidence interval needs at least two batches");
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");

  // Integer sums keep the result independent of batch order.
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;
  for (const std::uint64_t c : batch_completed) {
    if (c > batch_size) throw std::invalid_argument("batch count exceeds batch size");
    sum += c;
    sum_sq += static_cast<unsigned __int128>(c) * c;
  }
  const unsigned __int128 spread = sum_sq * n - static_cast<unsigned __int128>(sum) * sum;
  const double variance = static_cast<double>(spread) / static_cast<double>(n * (n - 1));
  const double stderr_count = std::sqrt(variance / static_cast<double>(n));
  const double t = student_t_critical(alpha, n - 1);

  return {100.0 * ratio(sum, n * batch_size),
          100.0 * t * stderr_count / static_cast<double>(batch_size)};
}

Summary summarize(std::span<const GameResult> results, const RunConfig& config) {
  if (results.empty()) throw std::invalid_argument("no results to summarize");
  if (config.batches == 0 || results.size() % config.batches != 0) {
    throw std::invalid_argument("batches must divide the number of games");
  }
  const std::uint64_t games = results.size();
  const std::uint64_t batch_size = games / config.batches;

  Summary s;
  s.config = config;
  s.batch_completed.assign(config.batches, 0);
  for (const GameResult& r : results) {
    if (r.game_index >= games) throw std::invalid_argument("game index out of range");
    if (r.outcome == Outcome::Completed) ++s.batch_completed[r.game_index / batch_size];
  }

  const Tally t = Tally::of(results);
  s.games = t.games;
  s.completed = t.completed;
  s.cycled = t.games - t.completed;
  s.completion_pct = 100.0 * ratio(t.completed, t.games);
  if (config.batches >= 2) {
    s.ci_halfwidth_pct = completion_ci(s.batch_completed, batch_size, config.alpha).halfwidth_pct;
  }
  s.mean_rounds = ratio(t.rounds_sum, t.games);
  s.mean_moves = ratio(t.moves_sum, t.games);
  s.mean_first_discard_round = ratio(t.first_discard_sum, t.first_discard_count);
  s.first_discard_excluded = t.games - t.first_discard_count;
  return s;
}

double estimate_play_time(double mean_moves, double mean_rounds) {
  return mean_moves * 1.0 + mean_rounds * 5.0;
}

void Histogram::add(std::uint64_t value) { ++bins[value / bin_width * bin_width]; }

std::uint64_t Histogram::total() const {
  std::uint64_t n = 0;
  for (const auto& [bin, count] : bins) n += count;
  return n;
}

Histograms build_histograms(std::span<const GameResult> results, std::uint64_t moves_bin_width) {
  if (moves_bin_width == 0) throw std::invalid_argument("moves bin width must be positive");
  Histograms h{{"rounds", 1, {}}, {"moves", moves_bin_width, {}}, {"cycle_length", 1, {}}};
  for (const GameResult& r : results) {
    h.rounds.add(static_cast<std::uint64_t>(r.rounds));
    h.moves.add(r.moves);
    if (r.outcome == Outcome::Cycled && r.cycle_length) {
      h.cycle_length.add(static_cast<std::uint64_t>(*r.cycle_length));
    }
  }
  return h;
}

std::string summary_json(const Summary& s) {
  nlohmann::ordered_json j;
  j["games"] = s.games;
  j["completed"] = s.completed;
  j["cycled"] = s.cycled;
  j["completion_pct"] = round_to(s.completion_pct, 2);
  j["ci_halfwidth_pct"] =
      s.ci_halfwidth_pct ? nlohmann::ordered_json(round_to(*s.ci_halfwidth_pct, 2)) : nullptr;
  j["mean_rounds"] = round_to(s.mean_rounds, 1);
  j["mean_first_discard_round"] = round_to(s.mean_first_discard_round, 1);
  j["first_discard_excluded"] = s.first_discard_excluded;
  j["mean_moves"] = round_to(s.mean_moves, 1);
  j["play_time_seconds"] = round_to(estimate_play_time(s), 1);
  j["batch_completed"] = s.batch_completed;
  j["recombine_mode"] = to_string(s.config.mode);
  j["master_seed"] = s.config.master_seed;
  j["config"] = {{"batches", s.config.batches},
                 {"batch_size", s.games / s.config.batches},
                 {"alpha", s.config.alpha},
                 {"moves_bin_width", s.config.moves_bin_width},
                 {"generator", s.config.generator},
                 {"version", kVersion}};
  return j.dump(2) + "\n";
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin,count\n";
  for (const auto& [bin, count] : histogram.bins) {
    out += std::to_string(bin) + "," + std::to_string(count) + "\n";
  }
  return out;
}

namespace {

constexpr std::string_view kMagic = "# perpetual results v1";
constexpr std::string_view kColumns =
    "game_index,outcome,rounds,moves,first_discard_round,cycle_length,cycle_start_round";

std::string opt(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }

template <class T>
T parse_number(std::string_view field, std::size_t line, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError(line, "bad " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

std::optional<int> parse_optional(std::string_view field, std::size_t line, std::string_view what) {
  if (field.empty()) return std::nullopt;
  const int v = parse_number<int>(field, line, what);
  if (v < 0) throw ParseError(line, "negative " + std::string(what));
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

std::string results_file(std::span<const GameResult> results, const RunConfig& config) {
  std::ostringstream out;
  out << kMagic << '\n'
      << "# master_seed=" << config.master_seed << " recombine_mode=" << to_string(config.mode)
      << " generator=" << config.generator << " games=" << results.size()
      << " batches=" << config.batches << " moves_bin_width=" << config.moves_bin_width
      << " version=" << kVersion << '\n'
      << kColumns << '\n';
  for (const GameResult& r : results) {
    out << r.game_index << ',' << to_string(r.outcome) << ',' << r.rounds << ',' << r.moves << ','
        << opt(r.first_discard_round) << ',' << opt(r.cycle_length) << ','
        << opt(r.cycle_start_round) << '\n';
  }
  return out.str();
}

ResultsFile parse_results_file(std::istream& in) {
  ResultsFile file;
  std::string line;
  std::size_t n = 0;
  std::optional<std::uint64_t> declared_games;

  auto next = [&](std::string_view expect) {
    if (!std::getline(in, line)) throw ParseError(n + 1, "missing " + std::string(expect));
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };

  next("header");
  if (line != kMagic) throw ParseError(n, "not a results file");
  next("config line");
  if (!line.starts_with("# ")) throw ParseError(n, "missing config line");
  for (std::string_view kv : split(std::string_view(line).substr(2), ' ')) {
    if (kv.empty()) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) throw ParseError(n, "bad config entry '" + std::string(kv) + "'");
    const std::string_view key = kv.substr(0, eq), value = kv.substr(eq + 1);
    if (key == "master_seed") {
      file.config.master_seed = parse_number<std::uint64_t>(value, n, "master_seed");
    } else if (key == "recombine_mode") {
      try {
        file.config.mode = parse_recombine_mode(value);
      } catch (const std::invalid_argument& e) {
        throw ParseError(n, e.what());
      }
    } else if (key == "generator") {
      file.config.generator = std::string(value);
    } else if (key == "games") {
      declared_games = parse_number<std::uint64_t>(value, n, "games");
    } else if (key == "batches") {
      file.config.batches = parse_number<std::uint64_t>(value, n, "batches");
    } else if (key == "moves_bin_width") {
      file.config.moves_bin_width = parse_number<std::uint64_t>(value, n, "moves_bin_width");
    }
  }
  next("column header");
  if (line != kColumns) throw ParseError(n, "unexpected column header");

  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw ParseError(n, "expected 7 fields, got " + std::to_string(f.size()));
    GameResult r;
    r.game_index = parse_number<std::uint64_t>(f[0], n, "game_index");
    if (f[1] == "completed") {
      r.outcome = Outcome::Completed;
    } else if (f[1] == "cycled") {
      r.outcome = Outcome::Cycled;
    } else {
      throw ParseError(n, "bad outcome '" + std::string(f[1]) + "'");
    }
    r.rounds = parse_number<int>(f[2], n, "rounds");
    if (r.rounds < 1) throw ParseError(n, "rounds must be at least 1");
    r.moves = parse_number<std::uint64_t>(f[3], n, "moves");
    r.first_discard_round = parse_optional(f[4], n, "first_discard_round");
    r.cycle_length = parse_optional(f[5], n, "cycle_length");
    r.cycle_start_round = parse_optional(f[6], n, "cycle_start_round");
    if ((r.outcome == Outcome::Cycled) != r.cycle_length.has_value()) {
      throw ParseError(n, "cycle_length must be present exactly for cycled games");
    }
    if (r.game_index != file.results.size()) {
      throw ParseError(n, "game_index " + std::to_string(r.game_index) + " out of sequence");
    }
    file.results.push_back(r);
  }
  if (declared_games && *declared_games != file.results.size()) {
    throw ParseError(n, "header declares " + std::to_string(*declared_games) + " games, found " +
                            std::to_string(file.results.size()));
  }
  return file;
}

}  // namespace perpetual
