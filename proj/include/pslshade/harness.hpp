#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pslshade/de.hpp"
#include "pslshade/metrics.hpp"
#include "pslshade/prescreen.hpp"
#include "pslshade/suite.hpp"

namespace pslshade::harness {

enum class AlgorithmKind { Lshade, PsLshade };

/// One optimizer configuration taking part in an experiment.
struct AlgorithmVariant {
  std::string label;
  AlgorithmKind kind = AlgorithmKind::Lshade;
  std::size_t ns = 1;
};

struct ControlOverrides {
  std::size_t n_init_per_dim = 18;
  std::size_t n_min = 4;
  double best_rate = 0.11;
  double archive_rate = 1.4;
  std::size_t memory_size = 5;
  double memory_f = 0.5;
  double memory_cr = 0.5;
};

struct ExperimentConfig {
  std::vector<std::string> algorithms{"lshade", "pslshade"};
  std::vector<std::size_t> dimensions{10, 20};
  std::int64_t budget_multiplier = 1000;
  int repetitions = 30;
  std::vector<int> functions{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<suite::Combo> combos{suite::kAllCombos.begin(), suite::kAllCombos.end()};
  std::uint64_t seed = 1;
  std::uint64_t suite_seed = 2021;
  int threads = 0;

  std::vector<std::size_t> ns_values{5};
  std::size_t archive_capacity = 0;
  prescreen::InitMode init = prescreen::InitMode::Lhs;
  prescreen::ScreeningPolicy policy = prescreen::ScreeningPolicy::Surrogate;
  bool diagnostics = false;
  bool dump_model = false;

  ControlOverrides control;

  /// Throws ConfigError on any invalid field.
  void validate() const;
  /// "lshade" maps to one variant; "pslshade" to one variant per N_s value,
  /// labelled "pslshade" or "pslshade-ns<k>" when several values are swept.
  std::vector<AlgorithmVariant> variants() const;
  std::int64_t max_nfe(std::size_t dimension) const { return budget_multiplier * static_cast<std::int64_t>(dimension); }
  de::ControlParams control_params(std::size_t dimension) const;
  prescreen::ScreeningConfig screening(const AlgorithmVariant& v) const;
  /// Hash of every setting that influences the result of `v`'s cells.
  std::string fingerprint(const AlgorithmVariant& v) const;
};

/// Parses the key = value config format (sections [experiment], [pslshade], [control]).
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Cell {
  AlgorithmVariant variant;
  int function = 1;
  suite::Combo combo = suite::Combo::None;
  std::size_t dimension = 10;
  int repetition = 0;
};

/// Stable hash of a label (FNV-1a).
std::uint64_t label_hash(std::string_view label);

/// Pure function of (master seed, algorithm label, function, combo, repetition).
std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view algorithm, int function,
                        suite::Combo combo, int repetition);

struct CellOutcome {
  metrics::RunRecord record;
  metrics::DiagnosticTrace trace;
  /// One line per generation: generation, r2, archive_size, the D center
  /// coordinates, then the df_mm coefficients.
  std::vector<std::string> model_dump;
  std::int64_t true_evaluations = 0;
};

/// Runs one optimization with the cell-derived seed. Objective values that
/// are not finite abort the run with NonFiniteEvaluation.
CellOutcome run_cell(const ExperimentConfig& config, const Cell& cell);

/// Runs one optimization with an explicit seed and budget.
CellOutcome run_cell(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed,
                     std::int64_t max_nfe);

/// Every cell of the config in canonical order (variant, dim, function, combo, rep).
std::vector<Cell> enumerate_cells(const ExperimentConfig& config);

enum class CellStatus { Ok, Failed };

struct ManifestEntry {
  CellStatus status = CellStatus::Ok;
  std::string fingerprint;
  std::string message;
};

struct CellId {
  std::string algorithm;
  std::size_t dimension;
  int function;
  suite::Combo combo;
  int repetition;

  auto operator<=>(const CellId&) const = default;
};

CellId cell_id(const Cell& cell);

/// Directory of per-cell record files plus a manifest of completed cells.
/// Safe for concurrent writes of distinct cells.
class ResultStore {
 public:
  static constexpr std::string_view kRecordSchema = "# schema=pslshade-record/1";
  static constexpr std::string_view kManifestSchema = "# schema=pslshade-manifest/1";

  explicit ResultStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  bool is_complete(const CellId& id, const std::string& fingerprint) const;
  void save(const CellId& id, const CellOutcome& outcome, const std::string& fingerprint);
  void mark_failed(const CellId& id, const std::string& fingerprint, const std::string& message);

  std::map<CellId, ManifestEntry> manifest() const;
  /// Records of every successful cell, in manifest order.
  std::vector<metrics::RunRecord> load_records() const;

  std::filesystem::path record_path(const CellId& id) const;
  std::filesystem::path diagnostics_path(const CellId& id) const;
  std::filesystem::path model_dump_path(const CellId& id) const;

 private:
  void load_manifest();
  void write_manifest() const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
  std::map<CellId, ManifestEntry> manifest_;
};

void write_record(std::ostream& out, const metrics::RunRecord& record);
metrics::RunRecord read_record(std::istream& in);

struct ExperimentSummary {
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
  std::size_t pending = 0;
  std::optional<metrics::Scoreboard> scoreboard;
  std::string scoreboard_error;
};

struct RunOptions {
  bool force = false;
  /// Stop after executing this many cells (the rest stay pending).
  std::optional<std::size_t> max_cells;
};

/// Executes every pending cell (in parallel when threads allow), then scores
/// the store if all cells succeeded. Writes scoreboard.csv into the store.
ExperimentSummary run_experiment(const ExperimentConfig& config, ResultStore& store,
                                 const RunOptions& options = {});

/// Scoreboard over all successful records of the given stores.
metrics::Scoreboard score_stores(const std::vector<std::filesystem::path>& roots);

/// Per-generation averages (NaN entries skipped) of the diagnostic traces of
/// every cell of `variant` on (function, dimension), over combos and reps.
metrics::DiagnosticTrace average_traces(const std::vector<metrics::DiagnosticTrace>& traces);

}  // namespace pslshade::harness
