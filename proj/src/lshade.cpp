#include <algorithm>

#include "pslshade/de.hpp"

namespace pslshade::de {

Lshade::Lshade(ControlParams params, SearchBounds bounds, std::uint64_t seed)
    : params_(params), bounds_(std::move(bounds)), rng_(seed) {
  params_.validate();
  bounds_.validate();
}

RunResult Lshade::run(BudgetedEvaluator& evaluator, const Observer& observer) {
  const std::size_t dim = bounds_.dimension();
  if (evaluator.remaining() < static_cast<std::int64_t>(params_.n_init))
    throw ConfigError("budget must cover the initial population");

  Population pop;
  for (auto& x : uniform_init(params_.n_init, bounds_, rng_)) {
    const double fx = evaluator(x);
    pop.members.push_back(Individual{std::move(x), fx});
  }
  ExternalArchive archive(archive_capacity(params_.archive_rate, pop.size()));
  ParameterMemory memory(params_.memory_size, params_.memory_f_init, params_.memory_cr_init);

  int g = 1;
  while (!evaluator.exhausted()) {
    pop.generation = g;
    if (observer) observer(GenerationView{g, evaluator.nfe(), pop, archive, memory});

    const std::size_t n = pop.size();
    const auto ranking = rank_by_fitness(pop);
    const std::size_t pool = pbest_pool_size(params_.best_rate, n);

    std::vector<Vector> trials(n);
    std::vector<double> fs(n);
    std::vector<double> crs(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& parent = pop.members[i].position;
      const TrialDraws draws = draw_trial_state(memory, dim, rng_);
      fs[i] = sample_f(memory.f(draws.memory_slot), rng_);
      crs[i] = draws.cr;
      const Donors donors = pick_donors(i, ranking, pool, n, archive.size(), rng_);
      const Vector v = mutate(parent, pop.members[donors.pbest].position,
                              pop.members[donors.r1].position, union_member(pop, archive, donors.r2),
                              fs[i]);
      trials[i] = crossover(parent, v, draws.cr, draws.forced, draws.crossover_draws);
      repair_bounds(trials[i], parent, bounds_);
    }

    std::vector<Success> s_f;
    std::vector<Success> s_cr;
    for (std::size_t i = 0; i < n && !evaluator.exhausted(); ++i) {
      Individual trial{std::move(trials[i]), 0.0};
      trial.fitness = evaluator(trial.position);
      if (trial_wins(pop.members[i], trial)) {
        const double delta = pop.members[i].fitness - trial.fitness;
        archive.insert(pop.members[i].position, rng_);
        s_f.push_back({fs[i], delta});
        s_cr.push_back({crs[i], delta});
        pop.members[i] = std::move(trial);
      }
    }
    memory.update(s_f, s_cr);
    shrink_population(pop, lpsr_next_size(params_, evaluator.nfe()), archive, params_.archive_rate,
                      rng_);
    ++g;
  }
  pop.generation = g;
  if (observer) observer(GenerationView{g, evaluator.nfe(), pop, archive, memory});

  RunResult result;
  result.best = *std::min_element(pop.members.begin(), pop.members.end(),
                                  [](const Individual& a, const Individual& b) { return a.fitness < b.fitness; });
  result.nfe = evaluator.nfe();
  result.generations = g - 1;
  return result;
}

}  // namespace pslshade::de
