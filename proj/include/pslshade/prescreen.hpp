#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pslshade/de.hpp"
#include "pslshade/features.hpp"
#include "pslshade/metrics.hpp"

// Pre-screening extension of LSHADE: Latin Hypercube initial sampling, an
// archive of evaluated samples, a global linear meta-model over six variable
// transformations, and N_s-way trial-vector screening.
namespace pslshade::prescreen {

using de::Vector;
using suite::SearchBounds;

/// One point per equal-width stratum in every dimension; strata are matched
/// across dimensions by independent random permutations.
std::vector<Vector> lhs_init(std::size_t n, const SearchBounds& bounds, Rng& rng);

inline constexpr double kSimilarityTolerance = 1e-12;

/// Bounded store of the best evaluated samples, free of near-duplicates.
class SampleArchive {
 public:
  struct Entry {
    Vector position;
    double fitness;
  };

  enum class Outcome { Inserted, ReplacedWorst, RejectedSimilar, RejectedWorse };

  explicit SampleArchive(std::size_t capacity) : capacity_(capacity) {}

  Outcome insert(std::span<const double> position, double fitness);
  /// Any entry whose position matches coordinate-wise, or whose fitness
  /// matches, within 1e-12.
  bool has_similar(std::span<const double> position, double fitness) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool full() const { return entries_.size() >= capacity_; }
  const std::vector<Entry>& entries() const { return entries_; }
  double worst_fitness() const;

 private:
  std::size_t capacity_;
  std::vector<Entry> entries_;
};

class MetaModel {
 public:
  MetaModel() = default;
  explicit MetaModel(std::size_t dimension)
      : dimension_(dimension), coefficients_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(df_mm(dimension)))) {}

  bool fitted() const { return fitted_; }
  std::size_t dimension() const { return dimension_; }
  /// Coefficients over feature_map(x, center()).
  const Eigen::VectorXd& coefficients() const { return coefficients_; }
  /// Expansion point of the polynomial terms; empty means the origin.
  const Vector& center() const { return center_; }
  /// In-sample coefficient of determination of the last fit, clamped to [0, 1].
  double r2() const { return r2_; }
  double r2_raw() const { return r2_raw_; }
  std::size_t rank() const { return rank_; }

  double predict(std::span<const double> x) const;

  /// Builds a fitted model from explicit coefficients.
  static MetaModel from_coefficients(Eigen::VectorXd coefficients, std::size_t dimension, Vector center = {});

 private:
  friend MetaModel fit(std::span<const Vector>, std::span<const double>);

  std::size_t dimension_ = 0;
  Eigen::VectorXd coefficients_;
  Vector center_;
  bool fitted_ = false;
  double r2_ = std::numeric_limits<double>::quiet_NaN();
  double r2_raw_ = std::numeric_limits<double>::quiet_NaN();
  std::size_t rank_ = 0;
};

/// Pivots below this fraction of the largest pivot are treated as zero.
inline constexpr double kRankThreshold = 1e-10;

/// Ordinary least squares over feature_map rows, expanded around the sample
/// mean, via column-pivoted QR on max-abs scaled columns. Returns an unfitted model when fewer than df_mm
/// samples are given.
MetaModel fit(std::span<const Vector> points, std::span<const double> values);
MetaModel fit(const SampleArchive& archive);

/// argmin of the surrogate over the trials, ties to the lowest index.
std::size_t screen(std::span<const Vector> trials, const MetaModel& model);
/// Same rule applied to precomputed surrogate values.
std::size_t argmin_first(std::span<const double> values);

/// Mutable state of an engine mid-generation that trial generation reads.
struct EngineState {
  const de::Population& population;
  const de::ExternalArchive& archive;
  const de::ParameterMemory& memory;
  std::span<const std::size_t> ranking;
  std::size_t pbest_pool;
  const SearchBounds& bounds;
};

struct ScreenedTrials {
  de::TrialDraws draws;
  std::vector<double> f;
  std::vector<Vector> trials;
};

/// N_s trials for parent i: shared memory slot, CR, forced index and
/// crossover draws; independent F and donors per trial.
ScreenedTrials generate_screened_trials(std::size_t i, const EngineState& state, std::size_t ns, Rng& rng);

enum class InitMode { Lhs, Uniform };
enum class ScreeningPolicy { Surrogate, Random };

struct ScreeningConfig {
  std::size_t ns = 5;
  /// 0 selects 2 * df_mm.
  std::size_t archive_capacity = 0;
  InitMode init = InitMode::Lhs;
  ScreeningPolicy policy = ScreeningPolicy::Surrogate;
  /// Truly evaluates every trial (outside the budget) to measure accuracy.
  bool diagnostics = false;

  std::size_t resolved_capacity(std::size_t dimension) const;
  void validate(std::size_t dimension) const;
};

struct GenerationDiagnostics {
  metrics::DiagnosticRow row;
  std::size_t screening_events = 0;
  std::size_t correct_selections = 0;
  /// Model used in this generation, or nullptr in the pre-model phase.
  const MetaModel* model = nullptr;
};

using DiagnosticsSink = std::function<void(const GenerationDiagnostics&)>;

/// LSHADE with pre-screening. With ns = 1 and uniform initialisation the
/// trajectory coincides with de::Lshade under the same seed.
class PsLshade {
 public:
  PsLshade(de::ControlParams params, ScreeningConfig screening, SearchBounds bounds, std::uint64_t seed);

  de::RunResult run(de::BudgetedEvaluator& evaluator, const de::Observer& observer = {},
                    const DiagnosticsSink& diagnostics = {});

  const SampleArchive& sample_archive() const { return samples_; }

 private:
  de::ControlParams params_;
  ScreeningConfig screening_;
  SearchBounds bounds_;
  Rng rng_;
  Rng screen_rng_;
  SampleArchive samples_;
};

}  // namespace pslshade::prescreen
