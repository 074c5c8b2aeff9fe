#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "perpetual/stats.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using perpetual::cli::run;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("perpetual_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate writes the output set") {
  const fs::path dir = scratch("sim");
  const Run r = invoke({"simulate", "--games", "200", "--batches", "10", "--seed", "42", "--out",
                        dir.string()});
  REQUIRE(r.code == 0);
  for (const char* name : {"summary.json", "rounds.csv", "moves.csv", "cycle_lengths.csv", "results.csv"}) {
    CHECK(fs::exists(dir / name));
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["completed"].get<int>() + summary["cycled"].get<int>() == 200);
  CHECK(summary["master_seed"] == 42);
  CHECK(summary["recombine_mode"] == "flip");
  CHECK(slurp(dir / "rounds.csv").starts_with("bin,count\n"));
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b"), c = scratch("det_c");
  const std::vector<std::string> base{"simulate", "--games", "300", "--batches", "10", "--seed", "7"};
  auto with = [&](const fs::path& dir, const char* threads) {
    auto args = base;
    args.insert(args.end(), {"--threads", threads, "--out", dir.string()});
    return invoke(args).code;
  };
  REQUIRE(with(a, "1") == 0);
  REQUIRE(with(b, "1") == 0);
  REQUIRE(with(c, "4") == 0);
  for (const char* name : {"summary.json", "rounds.csv", "moves.csv", "cycle_lengths.csv", "results.csv"}) {
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK(slurp(a / name) == slurp(c / name));
  }
}

TEST_CASE("usage and I/O errors map to exit codes") {
  const fs::path dir = scratch("bad");
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"simulate", "--out", dir.string(), "--bogus"}).code == 2);
  CHECK(invoke({"simulate", "--games", "10", "--batches", "3", "--out", dir.string()}).code == 2);
  CHECK(invoke({"simulate", "--recombine", "sideways", "--out", dir.string()}).code == 2);
  CHECK(invoke({"simulate", "--games", "10"}).code == 2);  // --out is required
  CHECK(invoke({"replay", "--deck", "A A A A A"}).code == 2);
  CHECK(invoke({"explore", "--max-length", "6", "--out", dir.string()}).code == 2);
  CHECK(invoke({"--help"}).code == 0);

  // A regular file where the output directory should go.
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  const Run r = invoke({"simulate", "--games", "10", "--batches", "2", "--out", (dir / "file" / "sub").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("analyze recomputes summary.json offline") {
  const fs::path dir = scratch("analyze");
  REQUIRE(invoke({"simulate", "--games", "500", "--batches", "10", "--seed", "3", "--recombine",
                  "noflip", "--out", dir.string()}).code == 0);
  const Run same = invoke({"analyze", "--in", (dir / "results.csv").string()});
  REQUIRE(same.code == 0);
  CHECK(same.out == slurp(dir / "summary.json"));

  const Run strict = invoke({"analyze", "--in", (dir / "results.csv").string(), "--alpha", "0.01"});
  REQUIRE(strict.code == 0);
  const auto loose = nlohmann::json::parse(same.out);
  const auto tight = nlohmann::json::parse(strict.out);
  CHECK(tight["ci_halfwidth_pct"].get<double>() > loose["ci_halfwidth_pct"].get<double>());
  CHECK(tight["config"]["alpha"] == 0.01);

  const fs::path redo = dir / "redo";
  REQUIRE(invoke({"analyze", "--in", (dir / "results.csv").string(), "--out", redo.string()}).code == 0);
  CHECK(slurp(redo / "summary.json") == slurp(dir / "summary.json"));
  CHECK(slurp(redo / "moves.csv") == slurp(dir / "moves.csv"));
}

TEST_CASE("analyze on equal batch counts and on malformed input") {
  const fs::path dir = scratch("analyze_equal");
  fs::create_directories(dir);
  std::vector<perpetual::GameResult> results;
  for (std::uint64_t i = 0; i < 100; ++i) {
    // Five completions in every batch of ten.
    if (i % 10 < 5) {
      results.push_back({i, perpetual::Outcome::Completed, 100, 5000, 20, std::nullopt, std::nullopt});
    } else {
      results.push_back({i, perpetual::Outcome::Cycled, 90, 4000, 30, 2, 88});
    }
  }
  std::ofstream(dir / "results.csv") << perpetual::results_file(results, perpetual::RunConfig{});
  const Run r = invoke({"analyze", "--in", (dir / "results.csv").string()});
  REQUIRE(r.code == 0);
  const auto json = nlohmann::json::parse(r.out);
  CHECK(json["ci_halfwidth_pct"] == 0.0);
  CHECK(json["completion_pct"] == 50.0);

  std::string text = slurp(dir / "results.csv");
  text.replace(text.find("5,cycled"), 8, "5,bogus!");
  std::ofstream(dir / "broken.csv") << text;
  const Run bad = invoke({"analyze", "--in", (dir / "broken.csv").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 9") != std::string::npos);

  CHECK(invoke({"analyze", "--in", (dir / "missing.csv").string()}).code == 1);
}

TEST_CASE("replay matches simulate and the reference") {
  const fs::path dir = scratch("replay");
  REQUIRE(invoke({"simulate", "--games", "20", "--batches", "1", "--seed", "11", "--out", dir.string()}).code == 0);
  std::istringstream in(slurp(dir / "results.csv"));
  const auto parsed = perpetual::parse_results_file(in);
  for (const std::uint64_t index : {0u, 7u, 19u}) {
    const Run r = invoke({"replay", "--seed", "11", "--index", std::to_string(index)});
    REQUIRE(r.code == 0);
    const std::string last = r.out.substr(r.out.rfind("result:"));
    CHECK(last == perpetual::format_result(parsed.results[index]) + "\n");
  }

  const Run quad = invoke({"replay", "--deck", "8 8 8 8"});
  REQUIRE(quad.code == 0);
  CHECK(quad.out ==
        "# replay recombine=flip deck=forced\n"
        "start: 8 8 8 8\n"
        "r1 t1 deal 8 8 8 8\n"
        "r1 t1 discard 8 8 8 8\n"
        "r1 end: -\n"
        "result: completed rounds=1 moves=8 first_discard_round=1\n");

  const Run pairs = invoke({"replay", "--deck", "A 2 A 2 A 2 A 2", "--recombine", "noflip"});
  REQUIRE(pairs.code == 0);
  const refsim::Result ref = refsim::play({1, 2, 1, 2, 1, 2, 1, 2}, false);
  CHECK(pairs.out.ends_with("result: completed rounds=" + std::to_string(ref.rounds) +
                            " moves=" + std::to_string(ref.moves) + " first_discard_round=" +
                            std::to_string(ref.first_discard_round) + "\n"));
  CHECK(pairs.out.find("r1 end: A A A A 2 2 2 2\n") != std::string::npos);

  const Run cyc = invoke({"replay", "--deck", "A A 2 A 2 A 2 2", "--verbose"});
  REQUIRE(cyc.code == 0);
  CHECK(cyc.out.ends_with("result: cycled rounds=3 moves=36 first_discard_round=none cycle_length=2 cycle_start_round=1\n"));
  CHECK(cyc.out.find("r1 cards: 8\n") != std::string::npos);
}

TEST_CASE("explore writes atlas and certificate") {
  const fs::path a = scratch("explore_a"), b = scratch("explore_b");
  REQUIRE(invoke({"explore", "--max-length", "8", "--mode", "flip", "--out", a.string()}).code == 0);
  REQUIRE(invoke({"explore", "--max-length", "8", "--mode", "flip", "--out", b.string()}).code == 0);
  const std::string fixed = slurp(a / "fixed_points.txt");
  CHECK(fixed.starts_with("# "));
  CHECK(fixed.find("exhaustive_lengths=4..8") != std::string::npos);
  CHECK(std::count(fixed.begin(), fixed.end(), '\n') == 1);  // header only: none found

  const std::string atlas = slurp(a / "atlas.csv");
  CHECK(atlas.starts_with("length,mode,cycle_length,count\n4,flip,"));
  CHECK(atlas.find("\n8,flip,2,") != std::string::npos);
  for (const char* name : {"atlas.csv", "fixed_points.txt", "explore.json"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }

  const fs::path c = scratch("explore_c");
  REQUIRE(invoke({"explore", "--max-length", "4", "--mode", "noflip", "--out", c.string()}).code == 0);
  CHECK(slurp(c / "fixed_points.txt").find("A 2 3 4  # mode=noflip length=4 reachability=unreachable") !=
        std::string::npos);

  const fs::path d = scratch("explore_d");
  REQUIRE(invoke({"explore", "--max-length", "16", "--exhaustive-limit", "8", "--samples", "200",
                  "--budget", "500", "--family", "full", "--out", d.string()}).code == 0);
  const auto echo = nlohmann::json::parse(slurp(d / "explore.json"));
  CHECK(echo["random_lengths"] == "12..16");
  CHECK(echo["family"] == "full");
}
