#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "pslshade/errors.hpp"
#include "pslshade/random.hpp"
#include "pslshade/suite.hpp"

// Building blocks of LSHADE: current-to-pbest/1 mutation, binomial
// crossover, greedy selection, the external archive of replaced parents,
// success-history parameter memory and linear population size reduction.
namespace pslshade::de {

using Vector = std::vector<double>;
using suite::SearchBounds;

struct ControlParams {
  std::size_t n_init = 0;
  std::size_t n_min = 4;
  double best_rate = 0.11;
  double archive_rate = 1.4;
  std::size_t memory_size = 5;
  double memory_f_init = 0.5;
  double memory_cr_init = 0.5;
  std::int64_t max_nfe = 0;

  /// N_init = 18 D, N_min = 4, M_F = M_CR = 0.5, p = 0.11, a = 1.4, H = 5.
  static ControlParams defaults(std::size_t dimension, std::int64_t max_nfe);
  /// Throws ConfigError on non-positive values or max_nfe < n_init.
  void validate() const;
};

struct Individual {
  Vector position;
  double fitness = std::numeric_limits<double>::quiet_NaN();

  bool evaluated() const { return fitness == fitness; }
};

struct Population {
  std::vector<Individual> members;
  int generation = 0;

  std::size_t size() const { return members.size(); }
};

/// Replaced parent positions, used as extra r2 donors.
class ExternalArchive {
 public:
  explicit ExternalArchive(std::size_t capacity = 0) : capacity_(capacity) {}

  /// Inserts a position; when full, a uniformly chosen entry is overwritten.
  void insert(const Vector& position, Rng& rng);
  /// Lowers (or raises) the capacity, evicting uniformly random entries.
  void resize(std::size_t capacity, Rng& rng);

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Vector& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<Vector>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<Vector> entries_;
};

/// floor(a * N) entries.
std::size_t archive_capacity(double archive_rate, std::size_t population_size);

/// A successful parameter value together with the fitness improvement it produced.
struct Success {
  double value;
  double improvement;
};

class ParameterMemory {
 public:
  ParameterMemory(std::size_t slots, double f_init, double cr_init);

  std::size_t slots() const { return f_.size(); }
  std::size_t cursor() const { return cursor_; }
  double f(std::size_t k) const { return f_[k]; }
  /// nullopt when the slot carries the terminal mark.
  std::optional<double> cr(std::size_t k) const;
  bool terminal(std::size_t k) const { return terminal_[k]; }

  /// Writes the weighted Lehmer means at the cursor and advances it. Empty
  /// success sets leave the memory untouched. A CR slot becomes terminal when
  /// every CR success is 0 and stays terminal afterwards.
  void update(std::span<const Success> s_f, std::span<const Success> s_cr);

 private:
  std::vector<double> f_;
  std::vector<double> cr_;
  std::vector<bool> terminal_;
  std::size_t cursor_ = 0;
};

/// sum w s^2 / sum w s with w proportional to the improvements.
double weighted_lehmer(std::span<const Success> successes);

inline constexpr double kParameterSpread = 0.1;
inline constexpr int kMaxFRedraws = 100;

/// Applies the F sampling rule to raw Cauchy(M_F, 0.1) draws: values above 1
/// are truncated to 1, non-positive values are redrawn up to 100 times, after
/// which the slot value itself is returned.
template <class RawDraw>
double sample_f(double slot, RawDraw&& next_raw) {
  for (int attempt = 0; attempt < kMaxFRedraws; ++attempt) {
    const double f = next_raw();
    if (f > 1.0) return 1.0;
    if (f > 0.0) return f;
  }
  return slot;
}

inline double sample_f(double slot, Rng& rng) {
  return sample_f(slot, [&] { return rng.cauchy(slot, kParameterSpread); });
}

inline double clip_cr(double raw) { return raw < 0.0 ? 0.0 : (raw > 1.0 ? 1.0 : raw); }

/// 0 for a terminal slot, otherwise Normal(M_CR, 0.1) clipped to [0, 1].
inline double sample_cr(std::optional<double> slot, Rng& rng) {
  if (!slot) return 0.0;
  return clip_cr(rng.normal(*slot, kParameterSpread));
}

/// v = x + F (x_pbest - x) + F (x_r1 - x_r2).
Vector mutate(std::span<const double> parent, std::span<const double> pbest,
              std::span<const double> r1, std::span<const double> r2, double f);

/// u[d] = mutant[d] if draws[d] <= CR or d == forced, else parent[d].
Vector crossover(std::span<const double> parent, std::span<const double> mutant, double cr,
                 std::size_t forced, std::span<const double> draws);

/// Out-of-range coordinates move halfway between the parent and the violated bound.
void repair_bounds(Vector& trial, std::span<const double> parent, const SearchBounds& bounds);

/// True iff the trial strictly improves on the parent. Throws
/// InvariantViolation if either fitness is unevaluated.
bool trial_wins(const Individual& parent, const Individual& trial);

/// Population size for the next generation given the evaluations spent.
std::size_t lpsr_next_size(const ControlParams& params, std::int64_t nfe);

/// max(2, round(p N)), never larger than N.
std::size_t pbest_pool_size(double best_rate, std::size_t population_size);

/// Member indices ordered by fitness, ties by index.
std::vector<std::size_t> rank_by_fitness(const Population& pop);

/// Keeps the `new_size` best members (ties by lower index) in their original
/// order and evicts archive entries down to floor(a * new_size).
void shrink_population(Population& pop, std::size_t new_size, ExternalArchive& archive,
                       double archive_rate, Rng& rng);

/// Donor indices for one mutation. r2 indexes the population followed by the
/// external archive.
struct Donors {
  std::size_t pbest;
  std::size_t r1;
  std::size_t r2;
};

/// pbest uniform in the best pool; r1 != i; r2 not in {i, r1}.
Donors pick_donors(std::size_t i, std::span<const std::size_t> ranking, std::size_t pool,
                   std::size_t population_size, std::size_t archive_size, Rng& rng);

/// Position of donor index r2 in the population/archive union.
const Vector& union_member(const Population& pop, const ExternalArchive& archive, std::size_t index);

/// Per-individual random state drawn at the start of a generation.
struct TrialDraws {
  std::size_t memory_slot;
  double cr;
  std::size_t forced;
  Vector crossover_draws;
};

TrialDraws draw_trial_state(const ParameterMemory& memory, std::size_t dimension, Rng& rng);

/// Wraps an objective with a hard evaluation budget, best-so-far tracking and
/// checkpoint recording. Non-finite values raise NonFiniteEvaluation.
class BudgetedEvaluator {
 public:
  using Objective = std::function<double(std::span<const double>)>;

  BudgetedEvaluator(Objective objective, std::int64_t max_nfe,
                    std::vector<std::int64_t> checkpoints = {});

  double operator()(std::span<const double> x);

  std::int64_t nfe() const { return nfe_; }
  std::int64_t max_nfe() const { return max_nfe_; }
  std::int64_t remaining() const { return max_nfe_ - nfe_; }
  bool exhausted() const { return nfe_ >= max_nfe_; }
  double best() const { return best_; }
  const std::vector<std::int64_t>& checkpoints() const { return checkpoints_; }
  /// Best-so-far fitness when each checkpoint NFE was reached.
  const std::vector<double>& checkpoint_values() const { return checkpoint_values_; }
  /// The raw objective, for evaluations that must not consume budget.
  const Objective& objective() const { return objective_; }

 private:
  Objective objective_;
  std::int64_t max_nfe_;
  std::int64_t nfe_ = 0;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<std::int64_t> checkpoints_;
  std::vector<double> checkpoint_values_;
  std::size_t next_checkpoint_ = 0;
};

/// Read-only view handed to per-generation observers.
struct GenerationView {
  int generation;
  std::int64_t nfe;
  const Population& population;
  const ExternalArchive& archive;
  const ParameterMemory& memory;
};

using Observer = std::function<void(const GenerationView&)>;

struct RunResult {
  Individual best;
  std::int64_t nfe = 0;
  int generations = 0;
};

/// Uniform random initial positions, coordinate-major per individual.
std::vector<Vector> uniform_init(std::size_t n, const SearchBounds& bounds, Rng& rng);

/// Plain LSHADE. The observer, if set, sees the population at the start of
/// every generation and once more after the final one.
class Lshade {
 public:
  Lshade(ControlParams params, SearchBounds bounds, std::uint64_t seed);

  RunResult run(BudgetedEvaluator& evaluator, const Observer& observer = {});

 private:
  ControlParams params_;
  SearchBounds bounds_;
  Rng rng_;
};

}  // namespace pslshade::de
