#include "pslshade/de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pslshade::de {

ControlParams ControlParams::defaults(std::size_t dimension, std::int64_t max_nfe) {
  ControlParams p;
  p.n_init = 18 * dimension;
  p.max_nfe = max_nfe;
  return p;
}

void ControlParams::validate() const {
  if (n_min < 4) throw ConfigError("N_min must be at least 4");
  if (n_init < n_min) throw ConfigError("N_init must be at least N_min");
  if (!(best_rate > 0.0 && best_rate <= 1.0)) throw ConfigError("best rate p must lie in (0, 1]");
  if (!(archive_rate >= 0.0)) throw ConfigError("archive rate must be non-negative");
  if (memory_size < 1) throw ConfigError("memory size H must be positive");
  if (!(memory_f_init > 0.0 && memory_f_init <= 1.0)) throw ConfigError("M_F must lie in (0, 1]");
  if (!(memory_cr_init >= 0.0 && memory_cr_init <= 1.0)) throw ConfigError("M_CR must lie in [0, 1]");
  if (max_nfe < static_cast<std::int64_t>(n_init))
    throw ConfigError("budget must cover the initial population");
}

std::size_t archive_capacity(double archive_rate, std::size_t population_size) {
  return static_cast<std::size_t>(std::floor(archive_rate * static_cast<double>(population_size)));
}

void ExternalArchive::insert(const Vector& position, Rng& rng) {
  if (capacity_ == 0) return;
  if (entries_.size() < capacity_) {
    entries_.push_back(position);
  } else {
    entries_[rng.index(entries_.size())] = position;
  }
}

void ExternalArchive::resize(std::size_t capacity, Rng& rng) {
  capacity_ = capacity;
  while (entries_.size() > capacity_) {
    const std::size_t victim = rng.index(entries_.size());
    entries_[victim] = std::move(entries_.back());
    entries_.pop_back();
  }
}

ParameterMemory::ParameterMemory(std::size_t slots, double f_init, double cr_init)
    : f_(slots, f_init), cr_(slots, cr_init), terminal_(slots, false) {
  if (slots == 0) throw ConfigError("parameter memory needs at least one slot");
}

std::optional<double> ParameterMemory::cr(std::size_t k) const {
  if (terminal_[k]) return std::nullopt;
  return cr_[k];
}

void ParameterMemory::update(std::span<const Success> s_f, std::span<const Success> s_cr) {
  if (s_f.empty() || s_cr.empty()) return;
  f_[cursor_] = weighted_lehmer(s_f);
  const bool all_zero =
      std::all_of(s_cr.begin(), s_cr.end(), [](const Success& s) { return s.value == 0.0; });
  if (terminal_[cursor_] || all_zero) {
    terminal_[cursor_] = true;
  } else {
    cr_[cursor_] = weighted_lehmer(s_cr);
  }
  cursor_ = (cursor_ + 1) % f_.size();
}

double weighted_lehmer(std::span<const Success> successes) {
  if (successes.empty()) throw InputError("weighted Lehmer mean of an empty set");
  double total = 0.0;
  for (const auto& s : successes) total += s.improvement;
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : successes) {
    const double w = s.improvement / total;
    num += w * s.value * s.value;
    den += w * s.value;
  }
  return num / den;
}

Vector mutate(std::span<const double> parent, std::span<const double> pbest,
              std::span<const double> r1, std::span<const double> r2, double f) {
  Vector v(parent.size());
  for (std::size_t d = 0; d < parent.size(); ++d)
    v[d] = parent[d] + f * (pbest[d] - parent[d]) + f * (r1[d] - r2[d]);
  return v;
}

Vector crossover(std::span<const double> parent, std::span<const double> mutant, double cr,
                 std::size_t forced, std::span<const double> draws) {
  Vector u(parent.size());
  for (std::size_t d = 0; d < parent.size(); ++d)
    u[d] = (draws[d] <= cr || d == forced) ? mutant[d] : parent[d];
  return u;
}

void repair_bounds(Vector& trial, std::span<const double> parent, const SearchBounds& bounds) {
  for (std::size_t d = 0; d < trial.size(); ++d) {
    if (trial[d] < bounds.lower[d]) {
      trial[d] = (parent[d] + bounds.lower[d]) / 2.0;
    } else if (trial[d] > bounds.upper[d]) {
      trial[d] = (parent[d] + bounds.upper[d]) / 2.0;
    }
  }
}

bool trial_wins(const Individual& parent, const Individual& trial) {
  if (!parent.evaluated() || !trial.evaluated())
    throw InvariantViolation("selection on an unevaluated individual");
  return trial.fitness < parent.fitness;
}

std::size_t lpsr_next_size(const ControlParams& params, std::int64_t nfe) {
  const double n_init = static_cast<double>(params.n_init);
  const double n_min = static_cast<double>(params.n_min);
  const double slope = (n_min - n_init) / static_cast<double>(params.max_nfe);
  const double raw = std::round(slope * static_cast<double>(nfe) + n_init);
  return static_cast<std::size_t>(std::clamp(raw, n_min, n_init));
}

std::size_t pbest_pool_size(double best_rate, std::size_t population_size) {
  const auto rounded =
      static_cast<std::size_t>(std::round(best_rate * static_cast<double>(population_size)));
  return std::min(population_size, std::max<std::size_t>(2, rounded));
}

std::vector<std::size_t> rank_by_fitness(const Population& pop) {
  std::vector<std::size_t> order(pop.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return pop.members[a].fitness < pop.members[b].fitness;
  });
  return order;
}

void shrink_population(Population& pop, std::size_t new_size, ExternalArchive& archive,
                       double archive_rate, Rng& rng) {
  if (new_size < pop.size()) {
    const auto order = rank_by_fitness(pop);
    std::vector<bool> keep(pop.size(), false);
    for (std::size_t k = 0; k < new_size; ++k) keep[order[k]] = true;
    std::vector<Individual> survivors;
    survivors.reserve(new_size);
    for (std::size_t i = 0; i < pop.size(); ++i) {
      if (keep[i]) survivors.push_back(std::move(pop.members[i]));
    }
    pop.members = std::move(survivors);
  }
  archive.resize(archive_capacity(archive_rate, pop.size()), rng);
}

Donors pick_donors(std::size_t i, std::span<const std::size_t> ranking, std::size_t pool,
                   std::size_t population_size, std::size_t archive_size, Rng& rng) {
  if (population_size < 3) throw InvariantViolation("donor selection needs at least 3 members");
  Donors d{};
  d.pbest = ranking[rng.index(pool)];
  do {
    d.r1 = rng.index(population_size);
  } while (d.r1 == i);
  do {
    d.r2 = rng.index(population_size + archive_size);
  } while (d.r2 == i || d.r2 == d.r1);
  return d;
}

const Vector& union_member(const Population& pop, const ExternalArchive& archive, std::size_t index) {
  if (index < pop.size()) return pop.members[index].position;
  return archive[index - pop.size()];
}

TrialDraws draw_trial_state(const ParameterMemory& memory, std::size_t dimension, Rng& rng) {
  TrialDraws t;
  t.memory_slot = rng.index(memory.slots());
  t.cr = sample_cr(memory.cr(t.memory_slot), rng);
  t.forced = rng.index(dimension);
  t.crossover_draws.resize(dimension);
  for (double& u : t.crossover_draws) u = rng.uniform();
  return t;
}

BudgetedEvaluator::BudgetedEvaluator(Objective objective, std::int64_t max_nfe,
                                     std::vector<std::int64_t> checkpoints)
    : objective_(std::move(objective)), max_nfe_(max_nfe), checkpoints_(std::move(checkpoints)) {
  if (!std::is_sorted(checkpoints_.begin(), checkpoints_.end()))
    throw ConfigError("checkpoints must be non-decreasing");
  checkpoint_values_.reserve(checkpoints_.size());
}

double BudgetedEvaluator::operator()(std::span<const double> x) {
  if (exhausted()) throw InvariantViolation("evaluation beyond the budget");
  const double value = objective_(x);
  if (!std::isfinite(value)) throw NonFiniteEvaluation("objective returned a non-finite value");
  ++nfe_;
  best_ = std::min(best_, value);
  while (next_checkpoint_ < checkpoints_.size() && checkpoints_[next_checkpoint_] <= nfe_) {
    checkpoint_values_.push_back(best_);
    ++next_checkpoint_;
  }
  return value;
}

std::vector<Vector> uniform_init(std::size_t n, const SearchBounds& bounds, Rng& rng) {
  std::vector<Vector> points(n, Vector(bounds.dimension()));
  for (auto& p : points) {
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = rng.uniform(bounds.lower[d], bounds.upper[d]);
  }
  return points;
}

}  // namespace pslshade::de
