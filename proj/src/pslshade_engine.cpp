#include <algorithm>
#include <cmath>

#include "pslshade/kernels.hpp"
#include "pslshade/prescreen.hpp"

namespace pslshade::prescreen {

namespace {

constexpr std::uint64_t kScreenStream = 0x5343524545ULL;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<Vector> positions(const de::Population& pop) {
  std::vector<Vector> out;
  out.reserve(pop.size());
  for (const auto& m : pop.members) out.push_back(m.position);
  return out;
}

}  // namespace

PsLshade::PsLshade(de::ControlParams params, ScreeningConfig screening, SearchBounds bounds, std::uint64_t seed)
    : params_(params),
      screening_(screening),
      bounds_(std::move(bounds)),
      rng_(seed),
      screen_rng_(combine_seed(seed, kScreenStream)),
      samples_(0) {
  params_.validate();
  bounds_.validate();
  screening_.validate(bounds_.dimension());
}

de::RunResult PsLshade::run(de::BudgetedEvaluator& evaluator, const de::Observer& observer,
                            const DiagnosticsSink& diagnostics) {
  const std::size_t dim = bounds_.dimension();
  const std::size_t df = df_mm(dim);
  if (evaluator.remaining() < static_cast<std::int64_t>(params_.n_init))
    throw ConfigError("budget must cover the initial population");

  samples_ = SampleArchive(screening_.resolved_capacity(dim));
  auto initial = screening_.init == InitMode::Lhs ? lhs_init(params_.n_init, bounds_, rng_)
                                                  : de::uniform_init(params_.n_init, bounds_, rng_);
  de::Population pop;
  for (auto& x : initial) {
    const double fx = evaluator(x);
    samples_.insert(x, fx);
    pop.members.push_back(de::Individual{std::move(x), fx});
  }
  de::ExternalArchive archive(de::archive_capacity(params_.archive_rate, pop.size()));
  de::ParameterMemory memory(params_.memory_size, params_.memory_f_init, params_.memory_cr_init);
  MetaModel model(dim);

  int g = 1;
  while (!evaluator.exhausted()) {
    pop.generation = g;
    if (observer) observer(de::GenerationView{g, evaluator.nfe(), pop, archive, memory});

    GenerationDiagnostics diag;
    if (diagnostics) {
      diag.row.generation = g;
      diag.row.nfe = evaluator.nfe();
      diag.row.hypervolume = metrics::hyper_volume(positions(pop));
      diag.row.accuracy = kNaN;
      diag.row.r2 = kNaN;
      diag.row.r2_raw = kNaN;
      diag.row.tau = kNaN;
    }

    const std::size_t n = pop.size();
    const auto ranking = de::rank_by_fitness(pop);
    const std::size_t pool = de::pbest_pool_size(params_.best_rate, n);
    const bool model_phase = samples_.size() >= df;
    const bool screening = model_phase && screening_.ns > 1;
    const std::size_t per_parent = screening ? screening_.ns : 1;

    const EngineState state{pop, archive, memory, ranking, pool, bounds_};
    std::vector<ScreenedTrials> generated;
    generated.reserve(n);
    for (std::size_t i = 0; i < n; ++i) generated.push_back(generate_screened_trials(i, state, per_parent, rng_));

    const bool need_model = model_phase && (screening || diagnostics);
    model = need_model ? fit(samples_) : MetaModel(dim);

    // Surrogate values of all N * N_s trials in one batch.
    std::vector<Vector> flat;
    std::vector<double> surrogate;
    if (model.fitted()) {
      flat.reserve(n * per_parent);
      for (const auto& s : generated)
        for (const auto& t : s.trials) flat.push_back(t);
      surrogate = kernels::surrogate_values(flat, model.coefficients(), model.center());
    }

    std::vector<std::size_t> chosen(n, 0);
    if (screening) {
      for (std::size_t i = 0; i < n; ++i) {
        if (screening_.policy == ScreeningPolicy::Random) {
          chosen[i] = screen_rng_.index(per_parent);
        } else {
          chosen[i] = argmin_first(std::span<const double>(surrogate).subspan(i * per_parent, per_parent));
        }
      }
    }

    const auto budget_left = static_cast<std::size_t>(std::max<std::int64_t>(0, evaluator.remaining()));
    const std::size_t evaluated = std::min(n, budget_left);

    if (diagnostics && screening && screening_.diagnostics) {
      std::vector<Vector> batch;
      batch.reserve(evaluated * per_parent);
      for (std::size_t i = 0; i < evaluated; ++i)
        for (const auto& t : generated[i].trials) batch.push_back(t);
      const auto truth = kernels::evaluate_batch(evaluator.objective(), batch);
      for (std::size_t i = 0; i < evaluated; ++i) {
        const auto values = std::span<const double>(truth).subspan(i * per_parent, per_parent);
        diag.correct_selections += metrics::selection_accuracy(values, chosen[i]) ? 1 : 0;
        ++diag.screening_events;
      }
      if (diag.screening_events > 0)
        diag.row.accuracy =
            static_cast<double>(diag.correct_selections) / static_cast<double>(diag.screening_events);
    }

    std::vector<de::Success> s_f;
    std::vector<de::Success> s_cr;
    std::vector<double> true_best;
    std::vector<double> surrogate_best;
    for (std::size_t i = 0; i < evaluated; ++i) {
      auto& gen = generated[i];
      const std::size_t j = chosen[i];
      de::Individual trial{std::move(gen.trials[j]), 0.0};
      trial.fitness = evaluator(trial.position);
      samples_.insert(trial.position, trial.fitness);
      if (model.fitted()) {
        true_best.push_back(trial.fitness);
        surrogate_best.push_back(surrogate[i * per_parent + j]);
      }
      if (de::trial_wins(pop.members[i], trial)) {
        const double delta = pop.members[i].fitness - trial.fitness;
        archive.insert(pop.members[i].position, rng_);
        s_f.push_back({gen.f[j], delta});
        s_cr.push_back({gen.draws.cr, delta});
        pop.members[i] = std::move(trial);
      }
    }
    memory.update(s_f, s_cr);
    de::shrink_population(pop, de::lpsr_next_size(params_, evaluator.nfe()), archive, params_.archive_rate,
                          rng_);

    if (diagnostics) {
      if (model.fitted()) {
        diag.row.r2 = model.r2();
        diag.row.r2_raw = model.r2_raw();
        diag.row.tau = metrics::kendall_tau(true_best, surrogate_best).value_or(kNaN);
        diag.model = &model;
      }
      diag.row.archive_size = samples_.size();
      diagnostics(diag);
    }
    ++g;
  }
  pop.generation = g;
  if (observer) observer(de::GenerationView{g, evaluator.nfe(), pop, archive, memory});

  de::RunResult result;
  result.best = *std::min_element(pop.members.begin(), pop.members.end(),
                                  [](const de::Individual& a, const de::Individual& b) { return a.fitness < b.fitness; });
  result.nfe = evaluator.nfe();
  result.generations = g - 1;
  return result;
}

}  // namespace pslshade::prescreen
