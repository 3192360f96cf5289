// Parallel kernels against their serial references. Arguments are
// (dimension, number of points). Thread count follows OMP_NUM_THREADS.
#include <benchmark/benchmark.h>

#include "pslshade/kernels.hpp"
#include "pslshade/prescreen.hpp"
#include "pslshade/suite.hpp"

using namespace pslshade;

namespace {

std::vector<kernels::Vector> points(std::size_t n, std::size_t dim) {
  Rng rng(n * 131 + dim);
  std::vector<kernels::Vector> out(n, kernels::Vector(dim));
  for (auto& p : out)
    for (double& v : p) v = rng.uniform(-100.0, 100.0);
  return out;
}

Eigen::VectorXd coefficients(std::size_t dim) {
  Rng rng(dim);
  Eigen::VectorXd c(static_cast<Eigen::Index>(prescreen::df_mm(dim)));
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = rng.uniform(-1.0, 1.0);
  return c;
}

template <bool Parallel>
void BM_DesignMatrix(benchmark::State& state) {
  const auto pts = points(static_cast<std::size_t>(state.range(1)), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto m = Parallel ? kernels::design_matrix(pts) : kernels::design_matrix_serial(pts);
    benchmark::DoNotOptimize(m.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool Parallel>
void BM_SurrogateValues(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto pts = points(static_cast<std::size_t>(state.range(1)), dim);
  const auto coef = coefficients(dim);
  for (auto _ : state) {
    auto v = Parallel ? kernels::surrogate_values(pts, coef) : kernels::surrogate_values_serial(pts, coef);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

template <bool Parallel>
void BM_EvaluateBatch(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto fn = suite::make_instance(dim, 2021, 9, suite::Combo::BSR);
  const kernels::Objective objective = [&fn](std::span<const double> x) { return fn.evaluate(x); };
  const auto pts = points(static_cast<std::size_t>(state.range(1)), dim);
  for (auto _ : state) {
    auto v = Parallel ? kernels::evaluate_batch(objective, pts) : kernels::evaluate_batch_serial(objective, pts);
    benchmark::DoNotOptimize(v.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}

// Context for the kernels: the least-squares refit that runs once per generation.
void BM_Fit(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto pts = points(2 * prescreen::df_mm(dim), dim);
  std::vector<double> values;
  for (const auto& p : pts) values.push_back(p[0] * p[0] + 3.0 * p[dim - 1]);
  for (auto _ : state) {
    auto model = prescreen::fit(pts, values);
    benchmark::DoNotOptimize(model.coefficients().data());
  }
}

void shapes(benchmark::internal::Benchmark* b) {
  for (const int dim : {10, 20})
    for (const int n : {100, 1000}) b->Args({dim, n});
}

}  // namespace

BENCHMARK(BM_DesignMatrix<false>)->Apply(shapes)->Name("design_matrix/serial");
BENCHMARK(BM_DesignMatrix<true>)->Apply(shapes)->Name("design_matrix/parallel");
BENCHMARK(BM_SurrogateValues<false>)->Apply(shapes)->Name("surrogate_values/serial");
BENCHMARK(BM_SurrogateValues<true>)->Apply(shapes)->Name("surrogate_values/parallel");
BENCHMARK(BM_EvaluateBatch<false>)->Apply(shapes)->Name("evaluate_batch/serial");
BENCHMARK(BM_EvaluateBatch<true>)->Apply(shapes)->Name("evaluate_batch/parallel");
BENCHMARK(BM_Fit)->Arg(10)->Arg(20)->Name("fit");

BENCHMARK_MAIN();
