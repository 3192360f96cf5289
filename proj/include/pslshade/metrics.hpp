#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pslshade/suite.hpp"

// Scoring pipeline (SNE / SR / Score) and per-generation diagnostics.
namespace pslshade::metrics {

inline constexpr std::size_t kCheckpointCount = 16;

/// NFE thresholds ceil(MAX_NFE * D^(k/5 - 3)), k = 0..15, clamped to
/// [1, MAX_NFE]. Products within 1e-9 (relative) above an integer round down
/// to that integer so that exact thresholds survive pow() rounding.
std::vector<std::int64_t> checkpoint_nfes(std::int64_t max_nfe, std::size_t dimension);

struct Checkpoint {
  std::int64_t nfe;
  double error;
};

struct RunRecord {
  std::string algorithm;
  int function = 0;
  suite::Combo combo = suite::Combo::None;
  std::size_t dimension = 0;
  int repetition = 0;
  std::vector<Checkpoint> checkpoints;

  double final_error() const { return checkpoints.empty() ? 0.0 : checkpoints.back().error; }
};

/// (best - optimum) / (worst_best - optimum); 0 whenever the numerator is 0.
double normalized_error(double best, double optimum, double worst_best);

/// Volume of the bounding box of the points; 0 for a single point.
double hyper_volume(std::span<const std::vector<double>> points);

/// True iff values[chosen] equals the minimum of values.
bool selection_accuracy(std::span<const double> values, std::size_t chosen);

/// Tie-corrected Kendall tau-b. nullopt for fewer than two pairs or when
/// either list is constant.
std::optional<double> kendall_tau(std::span<const double> a, std::span<const double> b);

/// 1 - SS_res / SS_tot without clamping. nullopt when observed has zero variance.
std::optional<double> r_squared_raw(std::span<const double> fitted, std::span<const double> observed);
/// r_squared_raw clamped to [0, 1].
std::optional<double> r_squared(std::span<const double> fitted, std::span<const double> observed);

/// Mean-shared ranks (1-based) of the values in ascending order.
std::vector<double> shared_ranks(std::span<const double> values);

struct CellKey {
  int function;
  suite::Combo combo;
  std::size_t dimension;

  auto operator<=>(const CellKey&) const = default;
};

/// Final errors of every repetition, per cell, for one algorithm.
using CellErrors = std::map<CellKey, std::vector<double>>;

struct ScoreRow {
  std::string algorithm;
  double sne = 0.0;
  double sr = 0.0;
  double score1 = 0.0;
  double score2 = 0.0;
  double score = 0.0;
};

struct Scoreboard {
  std::vector<ScoreRow> rows;

  const ScoreRow& at(const std::string& algorithm) const;
};

/// Aggregates errors of several algorithms. Every algorithm must cover the
/// same cells with the same repetition count; otherwise InputError.
Scoreboard score_pipeline(const std::map<std::string, CellErrors>& errors);

/// Groups run records into per-algorithm cell errors.
std::map<std::string, CellErrors> collect_final_errors(std::span<const RunRecord> records);

struct DiagnosticRow {
  int generation = 0;
  std::int64_t nfe = 0;
  double accuracy = 0.0;  // NaN when no screening happened
  double r2 = 0.0;        // clamped; NaN when the model is not fitted
  double r2_raw = 0.0;
  double tau = 0.0;       // NaN when undefined
  double hypervolume = 0.0;
  std::size_t archive_size = 0;
};

using DiagnosticTrace = std::vector<DiagnosticRow>;

/// Header: algorithm,SNE,SR,Score1,Score2,Score
void write_scoreboard_csv(std::ostream& out, const Scoreboard& board);
/// Header: generation,nfe,accuracy,r2,tau,hypervolume,archive_size
void write_diagnostics_csv(std::ostream& out, const DiagnosticTrace& trace);
/// Inverse of write_diagnostics_csv at its printed precision. The file has
/// no raw R² column, so r2_raw comes back as NaN. Throws InputError.
DiagnosticTrace read_diagnostics_csv(std::istream& in);

}  // namespace pslshade::metrics
