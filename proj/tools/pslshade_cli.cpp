#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pslshade/errors.hpp"
#include "pslshade/harness.hpp"
#include "pslshade/metrics.hpp"
#include "pslshade/suite.hpp"

namespace fs = std::filesystem;
using namespace pslshade;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "results";
  bool force = false;
  std::size_t dim = 10;
  std::string combo = "none";
  int threads = 0;
  std::optional<std::size_t> max_cells;
  std::vector<std::string> stores;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void print_scoreboard(const metrics::Scoreboard& board) {
  std::cout << std::left << std::setw(20) << "algorithm" << std::right << std::setw(12) << "SNE" << std::setw(10)
            << "SR" << std::setw(10) << "Score1" << std::setw(10) << "Score2" << std::setw(10) << "Score" << '\n';
  std::cout << std::fixed;
  for (const auto& r : board.rows) {
    std::cout << std::left << std::setw(20) << r.algorithm << std::right << std::setprecision(6) << std::setw(12)
              << r.sne << std::setprecision(3) << std::setw(10) << r.sr << std::setprecision(2) << std::setw(10)
              << r.score1 << std::setw(10) << r.score2 << std::setw(10) << r.score << '\n';
  }
  std::cout.unsetf(std::ios::floatfield);
}

harness::ExperimentConfig load(const Options& o) {
  if (o.config.empty()) throw ConfigError("--config is required");
  auto cfg = harness::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads > 0) cfg.threads = o.threads;
  return cfg;
}

int report(const harness::ExperimentSummary& s, const fs::path& root) {
  std::cout << "cells: executed=" << s.executed << " skipped=" << s.skipped << " failed=" << s.failed
            << " pending=" << s.pending << '\n';
  if (s.scoreboard) {
    print_scoreboard(*s.scoreboard);
    std::cout << "scoreboard written to " << (root / "scoreboard.csv").string() << '\n';
  } else {
    std::cout << "no scoreboard: " << s.scoreboard_error << '\n';
  }
  if (s.failed > 0) {
    std::cerr << "error: " << s.failed << " cell(s) failed; see " << (root / "manifest.tsv").string() << '\n';
    return 2;
  }
  return 0;
}

int cmd_run(const Options& o) {
  const auto cfg = load(o);
  harness::ResultStore store(o.out);
  const Stopwatch clock;
  const auto summary = harness::run_experiment(cfg, store, {o.force, o.max_cells});
  const int rc = report(summary, store.root());
  std::cout << "elapsed: " << std::fixed << std::setprecision(2) << clock.seconds() << " s\n";
  return rc;
}

int cmd_score(const Options& o) {
  std::vector<fs::path> roots(o.stores.begin(), o.stores.end());
  if (roots.empty()) roots.emplace_back(o.out);
  const auto board = harness::score_stores(roots);
  print_scoreboard(board);
  return 0;
}

int cmd_diag(const Options& o) {
  auto cfg = load(o);
  cfg.diagnostics = true;
  harness::ResultStore store(o.out);
  const Stopwatch clock;
  const auto summary = harness::run_experiment(cfg, store, {o.force, o.max_cells});
  const int rc = report(summary, store.root());

  // One averaged table per (variant, dimension, function), pooled over combos and repetitions.
  const fs::path dir = store.root() / "diag_summary";
  fs::create_directories(dir);
  std::map<std::tuple<std::string, std::size_t, int>, std::vector<metrics::DiagnosticTrace>> groups;
  const auto manifest = store.manifest();
  for (const auto& cell : harness::enumerate_cells(cfg)) {
    if (cell.variant.kind != harness::AlgorithmKind::PsLshade) continue;
    const auto id = harness::cell_id(cell);
    const auto it = manifest.find(id);
    if (it == manifest.end() || it->second.status != harness::CellStatus::Ok) continue;
    std::ifstream in(store.diagnostics_path(id));
    if (!in) throw InputError("missing diagnostics for " + store.record_path(id).string());
    groups[{id.algorithm, id.dimension, id.function}].push_back(metrics::read_diagnostics_csv(in));
  }
  std::cout << std::left << std::setw(20) << "algorithm" << std::setw(6) << "dim" << std::setw(6) << "F"
            << std::right << std::setw(14) << "mean_accuracy" << std::setw(10) << "mean_r2" << '\n';
  for (const auto& [key, traces] : groups) {
    const auto& [label, dimension, function] = key;
    const auto avg = harness::average_traces(traces);
    const fs::path path = dir / (label + "_D" + std::to_string(dimension) + "_F" + std::to_string(function) + ".csv");
    std::ofstream out(path);
    metrics::write_diagnostics_csv(out, avg);
    double acc = 0.0, r2 = 0.0;
    std::size_t na = 0, nr = 0;
    for (const auto& row : avg) {
      if (!std::isnan(row.accuracy)) acc += row.accuracy, ++na;
      if (!std::isnan(row.r2)) r2 += row.r2, ++nr;
    }
    std::cout << std::left << std::setw(20) << label << std::setw(6) << dimension << std::setw(6) << function
              << std::right << std::fixed << std::setprecision(4) << std::setw(14)
              << (na ? acc / static_cast<double>(na) : std::nan("")) << std::setw(10)
              << (nr ? r2 / static_cast<double>(nr) : std::nan("")) << '\n';
    std::cout.unsetf(std::ios::floatfield);
  }
  std::cout << "per-generation tables written to " << dir.string() << '\n';
  std::cout << "elapsed: " << std::fixed << std::setprecision(2) << clock.seconds() << " s\n";
  return rc;
}

int cmd_suite(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(2021);
  const auto combo = suite::parse_combo(o.combo);
  for (int id = 1; id <= static_cast<int>(suite::kSuiteSize); ++id)
    std::cout << suite::manifest_line(suite::make_instance(o.dim, seed, id, combo), seed) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSHADE and pre-screening LSHADE experiment runner"};
  app.require_subcommand(1);
  Options o;

  auto add_experiment_flags = [&o](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config file (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the master seed");
    sub->add_option("--out", o.out, "Result store directory")->capture_default_str();
    sub->add_flag("--force", o.force, "Re-run cells that are already complete");
    sub->add_option("--threads", o.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--max-cells", o.max_cells, "Stop after this many cells (resume later)");
  };

  auto* run = app.add_subcommand("run", "Execute every pending cell of a config and score the store");
  add_experiment_flags(run);
  auto* diag = app.add_subcommand("diag", "Run with diagnostics and write averaged per-generation tables");
  add_experiment_flags(diag);

  auto* score = app.add_subcommand("score", "Aggregate one or more result stores into a scoreboard");
  score->add_option("stores", o.stores, "Store directories")->check(CLI::ExistingDirectory);
  score->add_option("--out", o.out, "Store directory when no positional store is given");

  auto* suite_cmd = app.add_subcommand("suite", "Print the benchmark suite manifest");
  suite_cmd->add_option("--dim", o.dim, "Dimension")->capture_default_str();
  suite_cmd->add_option("--seed", o.seed, "Suite seed (default 2021)");
  suite_cmd->add_option("--combo", o.combo, "Transformation combo: none, S, B+S, S+R or B+S+R")->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  try {
    if (run->parsed()) return cmd_run(o);
    if (diag->parsed()) return cmd_diag(o);
    if (score->parsed()) return cmd_score(o);
    if (suite_cmd->parsed()) return cmd_suite(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
