#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "perpetual/explore.hpp"
#include "perpetual/game.hpp"
#include "perpetual/simulate.hpp"
#include "perpetual/stats.hpp"

namespace perpetual::cli {
namespace {

namespace fs = std::filesystem;

/// Raised for bad flag combinations that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + path.string() + " for writing");
  file << content;
  if (!file.flush()) throw std::runtime_error("failed writing " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

RecombineMode mode_flag(const std::string& text) {
  try {
    return parse_recombine_mode(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

void write_outputs(const fs::path& dir, const Summary& summary, const Histograms& hist) {
  ensure_dir(dir);
  write_file(dir / "summary.json", summary_json(summary));
  write_file(dir / "rounds.csv", histogram_csv(hist.rounds));
  write_file(dir / "moves.csv", histogram_csv(hist.moves));
  write_file(dir / "cycle_lengths.csv", histogram_csv(hist.cycle_length));
}

void print_summary(std::ostream& out, const Summary& s) {
  char line[256];
  std::snprintf(line, sizeof line,
                "games %llu: completed %llu (%.2f%% +/- %.2f), cycled %llu, mean rounds %.1f, "
                "mean moves %.1f, mean first discard round %.1f\n",
                static_cast<unsigned long long>(s.games), static_cast<unsigned long long>(s.completed),
                s.completion_pct, s.ci_halfwidth_pct.value_or(0.0),
                static_cast<unsigned long long>(s.cycled), s.mean_rounds, s.mean_moves,
                s.mean_first_discard_round);
  out << line;
}

struct SimulateFlags {
  std::uint64_t games = 10000;
  std::uint64_t batches = 10;
  std::uint64_t seed = 2009;
  std::string recombine = "flip";
  std::uint64_t moves_bin_width = 250;
  double alpha = 0.05;
  unsigned threads = 0;
  bool no_prune = false;
  std::string out;
};

int simulate(const SimulateFlags& f, std::ostream& out) {
  ExperimentConfig config{f.games, f.batches, f.seed, mode_flag(f.recombine), !f.no_prune};
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const RunConfig run{f.seed, config.mode, f.batches, f.alpha, f.moves_bin_width, SplitMix64::kName};

  const std::vector<GameResult> results = run_experiment(config, f.threads);
  const Summary summary = summarize(results, run);
  const fs::path dir(f.out);
  write_outputs(dir, summary, build_histograms(results, f.moves_bin_width));
  write_file(dir / "results.csv", results_file(results, run));
  print_summary(out, summary);
  return kExitOk;
}

struct AnalyzeFlags {
  std::string in;
  double alpha = 0.05;
  std::uint64_t moves_bin_width = 0;  // 0: keep the width recorded in the file
  std::string out;
};

int analyze(const AnalyzeFlags& f, std::ostream& out) {
  std::ifstream file(f.in, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + f.in);
  ResultsFile parsed = [&] {
    try {
      return parse_results_file(file);
    } catch (const ParseError& e) {
      throw std::runtime_error(f.in + ": " + e.what());
    }
  }();
  if (parsed.results.empty()) throw std::runtime_error(f.in + ": no game records");
  parsed.config.alpha = f.alpha;
  if (f.moves_bin_width) parsed.config.moves_bin_width = f.moves_bin_width;

  const Summary summary = summarize(parsed.results, parsed.config);
  if (f.out.empty()) {
    out << summary_json(summary);
  } else {
    write_outputs(f.out, summary, build_histograms(parsed.results, parsed.config.moves_bin_width));
    print_summary(out, summary);
  }
  return kExitOk;
}

struct ReplayFlags {
  std::uint64_t seed = 2009;
  std::uint64_t index = 0;
  std::string recombine = "flip";
  bool verbose = false;
  std::string deck;
};

int replay(const ReplayFlags& f, std::ostream& out) {
  const RecombineMode mode = mode_flag(f.recombine);
  Hand deck;
  out << "# replay recombine=" << to_string(mode);
  if (!f.deck.empty()) {
    try {
      deck = parse_hand(f.deck);
      validate_deck(deck);
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--deck: ") + e.what());
    }
    out << " deck=forced\n";
  } else {
    deck = shuffled_deck(f.seed, f.index);
    out << " seed=" << f.seed << " index=" << f.index << " generator=" << SplitMix64::kName
        << '\n';
  }
  TextTrace trace(out, f.verbose);
  play_game(std::move(deck), {mode, true}, &trace);
  return kExitOk;
}

struct ExploreFlags {
  std::size_t max_length = 12;
  std::string mode = "both";
  std::string family = "all";
  std::uint64_t budget = 1'000'000;
  std::size_t exhaustive_limit = 12;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 2009;
  unsigned threads = 0;
  std::string out;
};

std::string length_range(std::size_t from, std::size_t to) {
  if (from > to) return "none";
  return std::to_string(from) + ".." + std::to_string(to);
}

int explore(const ExploreFlags& f, std::ostream& out) {
  if (f.max_length == 0 || f.max_length % 4 != 0 || f.max_length > 52) {
    throw UsageError("--max-length must be a positive multiple of 4 no larger than 52");
  }
  if (f.exhaustive_limit % 4 != 0) throw UsageError("--exhaustive-limit must be a multiple of 4");
  std::vector<RecombineMode> modes;
  if (f.mode == "both") {
    modes = {RecombineMode::Flip, RecombineMode::NoFlip};
  } else {
    modes = {mode_flag(f.mode)};
  }
  PatternFamily family;
  try {
    family = parse_pattern_family(f.family);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  SearchOptions options;
  options.family = family;
  options.seed = f.seed;
  options.workers = f.threads ? f.threads : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t exhaustive_to = std::min(f.max_length, f.exhaustive_limit);

  nlohmann::ordered_json echo;
  echo["max_length"] = f.max_length;
  echo["modes"] = nlohmann::json::array();
  for (const RecombineMode m : modes) echo["modes"].push_back(to_string(m));
  echo["family"] = to_string(family);
  echo["budget"] = f.budget;
  echo["exhaustive_lengths"] = length_range(4, exhaustive_to);
  echo["random_lengths"] = length_range(exhaustive_to + 4, f.max_length);
  echo["samples"] = f.samples;
  echo["seed"] = f.seed;
  echo["generator"] = SplitMix64::kName;
  echo["version"] = kVersion;
  echo["atlas"] = nlohmann::json::array();

  std::ostringstream atlas_csv;
  atlas_csv << "length,mode,cycle_length,count\n";
  for (std::size_t length = 4; length <= f.max_length; length += 4) {
    for (const RecombineMode mode : modes) {
      const Atlas atlas = orbit_atlas(length, mode, f.budget, options);
      // cycle_length 0 counts patterns that empty out (complete).
      if (atlas.completed) {
        atlas_csv << length << ',' << to_string(mode) << ",0," << atlas.completed << '\n';
      }
      std::vector<int> lengths;
      for (const auto& [len, n] : atlas.cycle_lengths) {
        atlas_csv << length << ',' << to_string(mode) << ',' << len << ',' << n << '\n';
        lengths.push_back(len);
      }
      echo["atlas"].push_back({{"length", length},
                               {"mode", to_string(mode)},
                               {"exhaustive", atlas.exhaustive},
                               {"patterns", atlas.examined},
                               {"completed", atlas.completed},
                               {"cycle_lengths", lengths}});
      out << "atlas length " << length << ' ' << to_string(mode) << ": "
          << (atlas.exhaustive ? "exhaustive" : "sampled") << ", " << atlas.examined
          << " patterns, " << atlas.completed << " complete, cycle lengths {";
      for (std::size_t i = 0; i < lengths.size(); ++i) out << (i ? "," : "") << lengths[i];
      out << "}\n";
    }
  }

  std::vector<FixedPointSearch> searches;
  for (const RecombineMode mode : modes) {
    if (exhaustive_to >= 4) searches.push_back(find_single_round_cycles(exhaustive_to, mode, options));
    for (std::size_t length = exhaustive_to + 4; length <= f.max_length; length += 4) {
      searches.push_back(random_single_round_search(length, mode, f.samples, options));
    }
  }

  std::ostringstream fixed;
  fixed << "# single-round cycles (no-discard round returning the same order) modes=";
  for (std::size_t i = 0; i < modes.size(); ++i) fixed << (i ? "," : "") << to_string(modes[i]);
  fixed << " family=" << to_string(family) << " exhaustive_lengths=" << length_range(4, exhaustive_to)
        << " random_lengths=" << length_range(exhaustive_to + 4, f.max_length);
  if (f.max_length > exhaustive_to) fixed << " samples=" << f.samples << " seed=" << f.seed;
  fixed << " version=" << kVersion << '\n';
  nlohmann::ordered_json found_json = nlohmann::json::array();
  for (const FixedPointSearch& s : searches) {
    std::map<std::string, std::uint64_t> found_per_length;
    for (const FixedPoint& fp : s.found) {
      // Self-check before anything is reported.
      const Hand hand = fp.pattern.to_hand();
      if (round_map(hand, fp.mode) != hand) continue;
      fixed << fp.pattern.to_tokens() << "  # mode=" << to_string(fp.mode)
            << " length=" << hand.size() << " reachability=" << to_string(fp.reachability) << '\n';
      ++found_per_length[std::to_string(hand.size())];
    }
    for (const auto& [length, examined] : s.examined) {
      const auto key = std::to_string(length);
      found_json.push_back({{"mode", to_string(s.mode)},
                            {"length", length},
                            {"examined", examined},
                            {"found", found_per_length.count(key) ? found_per_length[key] : 0}});
      out << "fixed points " << to_string(s.mode) << " length " << length << ": "
          << found_json.back()["found"] << " of " << examined << " patterns\n";
    }
  }
  echo["fixed_point_search"] = std::move(found_json);

  const fs::path dir(f.out);
  ensure_dir(dir);
  write_file(dir / "atlas.csv", atlas_csv.str());
  write_file(dir / "fixed_points.txt", fixed.str());
  write_file(dir / "explore.json", echo.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perpetual Motion solitaire simulator and analysis toolkit", "perpetual"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Play a seeded batch of games and write statistics");
  sim_cmd->add_option("--games", sim.games, "Number of games")->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--batches", sim.batches, "Equal batches for the confidence interval (must divide --games)")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  sim_cmd->add_option("--recombine", sim.recombine, "Deal orientation after recombining: flip or noflip")
      ->capture_default_str();
  sim_cmd->add_option("--moves-bin-width", sim.moves_bin_width, "Bin width of moves.csv")
      ->capture_default_str()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--alpha", sim.alpha, "Significance level of the completion interval")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
  sim_cmd->add_flag("--no-prune", sim.no_prune, "Keep larger-hand states in the cycle ledger");
  sim_cmd->add_option("--out", sim.out, "Output directory")->required();

  AnalyzeFlags ana;
  auto* ana_cmd = app.add_subcommand("analyze", "Recompute summary.json from a results.csv without re-simulating");
  ana_cmd->add_option("--in", ana.in, "results.csv written by simulate")->required();
  ana_cmd->add_option("--alpha", ana.alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  ana_cmd->add_option("--moves-bin-width", ana.moves_bin_width, "Override the recorded moves bin width");
  ana_cmd->add_option("--out", ana.out, "Write summary.json and CSVs here instead of printing JSON");

  ReplayFlags rep;
  auto* rep_cmd = app.add_subcommand("replay", "Print the turn-by-turn trace of one game");
  rep_cmd->add_option("--seed", rep.seed, "Master seed")->capture_default_str();
  rep_cmd->add_option("--index", rep.index, "Game index within the seed")->capture_default_str();
  rep_cmd->add_option("--recombine", rep.recombine, "flip or noflip")->capture_default_str();
  rep_cmd->add_flag("--verbose", rep.verbose, "Also print the card count after each round");
  rep_cmd->add_option("--deck", rep.deck, "Play this deck instead of shuffling")->group("");

  ExploreFlags exp;
  auto* exp_cmd = app.add_subcommand("explore", "Search small decks for single-round cycles and map cycle lengths");
  exp_cmd->add_option("--max-length", exp.max_length, "Largest deck size (multiple of 4)")->capture_default_str();
  exp_cmd->add_option("--mode", exp.mode, "flip, noflip or both")->capture_default_str();
  exp_cmd->add_option("--family", exp.family, "all patterns, or full (every rank exactly four times)")
      ->capture_default_str();
  exp_cmd->add_option("--budget", exp.budget, "Patterns per atlas length before switching to sampling")
      ->capture_default_str()->check(CLI::PositiveNumber);
  exp_cmd->add_option("--exhaustive-limit", exp.exhaustive_limit, "Largest length searched exhaustively for fixed points")
      ->capture_default_str();
  exp_cmd->add_option("--samples", exp.samples, "Random patterns per length beyond the exhaustive limit")
      ->capture_default_str();
  exp_cmd->add_option("--seed", exp.seed, "Seed for sampling")->capture_default_str();
  exp_cmd->add_option("--threads", exp.threads, "Worker threads (0 = all cores)")->capture_default_str();
  exp_cmd->add_option("--out", exp.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim_cmd) return simulate(sim, out);
    if (*ana_cmd) return analyze(ana, out);
    if (*rep_cmd) return replay(rep, out);
    if (*exp_cmd) return explore(exp, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace perpetual::cli
