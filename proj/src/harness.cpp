#include "pslshade/harness.hpp"

#include <omp.h>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pslshade/errors.hpp"

namespace pslshade::harness {

std::uint64_t label_hash(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t cell_seed(std::uint64_t master_seed, std::string_view algorithm, int function,
                        suite::Combo combo, int repetition) {
  std::uint64_t s = combine_seed(master_seed, label_hash(algorithm));
  s = combine_seed(s, static_cast<std::uint64_t>(function));
  s = combine_seed(s, static_cast<std::uint64_t>(combo));
  return combine_seed(s, static_cast<std::uint64_t>(repetition));
}

std::vector<Cell> enumerate_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (const auto& v : config.variants())
    for (const auto d : config.dimensions)
      for (const int f : config.functions)
        for (const auto c : config.combos)
          for (int r = 0; r < config.repetitions; ++r) cells.push_back(Cell{v, f, c, d, r});
  return cells;
}

CellOutcome run_cell(const ExperimentConfig& config, const Cell& cell) {
  return run_cell(config, cell,
                  cell_seed(config.seed, cell.variant.label, cell.function, cell.combo, cell.repetition),
                  config.max_nfe(cell.dimension));
}

CellOutcome run_cell(const ExperimentConfig& config, const Cell& cell, std::uint64_t seed, std::int64_t max_nfe) {
  const std::size_t dim = cell.dimension;
  const auto fn = suite::make_instance(dim, config.suite_seed, cell.function, cell.combo);
  de::ControlParams params = config.control_params(dim);
  params.max_nfe = max_nfe;
  params.validate();

  de::BudgetedEvaluator evaluator([fn](std::span<const double> x) { return fn.evaluate(x); }, max_nfe,
                                  metrics::checkpoint_nfes(max_nfe, dim));
  const auto bounds = suite::SearchBounds::cube(dim);

  CellOutcome outcome;
  const bool want_trace = config.diagnostics || config.dump_model;

  if (cell.variant.kind == AlgorithmKind::Lshade) {
    de::Observer observer;
    if (want_trace) {
      observer = [&](const de::GenerationView& view) {
        if (view.nfe >= max_nfe) return;
        std::vector<de::Vector> points;
        for (const auto& m : view.population.members) points.push_back(m.position);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        outcome.trace.push_back(metrics::DiagnosticRow{view.generation, view.nfe, nan, nan, nan, nan,
                                                       metrics::hyper_volume(points), 0});
      };
    }
    de::Lshade(params, bounds, seed).run(evaluator, observer);
  } else {
    prescreen::DiagnosticsSink sink;
    if (want_trace) {
      sink = [&](const prescreen::GenerationDiagnostics& d) {
        if (config.diagnostics) outcome.trace.push_back(d.row);
        if (config.dump_model && d.model) {
          std::ostringstream line;
          line << std::setprecision(17) << d.row.generation << ',' << d.model->r2() << ',' << d.row.archive_size;
          for (const double c : d.model->center()) line << ',' << c;
          for (const double c : d.model->coefficients()) line << ',' << c;
          outcome.model_dump.push_back(line.str());
        }
      };
    }
    prescreen::PsLshade(params, config.screening(cell.variant), bounds, seed).run(evaluator, {}, sink);
  }

  auto& record = outcome.record;
  record.algorithm = cell.variant.label;
  record.function = cell.function;
  record.combo = cell.combo;
  record.dimension = dim;
  record.repetition = cell.repetition;
  const auto& nfes = evaluator.checkpoints();
  const auto& values = evaluator.checkpoint_values();
  for (std::size_t k = 0; k < values.size(); ++k)
    record.checkpoints.push_back({nfes[k], std::max(0.0, values[k] - fn.optimum_value())});
  outcome.true_evaluations = evaluator.nfe();
  return outcome;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, ResultStore& store, const RunOptions& options) {
  config.validate();
  const auto cells = enumerate_cells(config);
  std::vector<const Cell*> pending;
  ExperimentSummary summary;
  for (const auto& c : cells) {
    if (!options.force && store.is_complete(cell_id(c), config.fingerprint(c.variant))) {
      ++summary.skipped;
    } else {
      pending.push_back(&c);
    }
  }
  if (options.max_cells && pending.size() > *options.max_cells) {
    summary.pending = pending.size() - *options.max_cells;
    pending.resize(*options.max_cells);
  }

  std::atomic<std::size_t> executed{0};
  std::atomic<std::size_t> failed{0};
  const int threads = config.threads > 0 ? config.threads : omp_get_max_threads();
  const auto count = static_cast<std::ptrdiff_t>(pending.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const Cell& cell = *pending[static_cast<std::size_t>(k)];
    const auto id = cell_id(cell);
    const auto fingerprint = config.fingerprint(cell.variant);
    try {
      const auto outcome = run_cell(config, cell);
      store.save(id, outcome, fingerprint);
      ++executed;
    } catch (const std::exception& e) {
      store.mark_failed(id, fingerprint, e.what());
      ++failed;
    }
  }
  summary.executed = executed;
  summary.failed = failed;

  if (summary.pending > 0) {
    summary.scoreboard_error = "experiment incomplete";
    return summary;
  }
  const auto manifest = store.manifest();
  std::vector<metrics::RunRecord> records;
  for (const auto& c : cells) {
    const auto id = cell_id(c);
    const auto it = manifest.find(id);
    if (it == manifest.end() || it->second.status != CellStatus::Ok) continue;
    std::ifstream in(store.record_path(id));
    records.push_back(read_record(in));
  }
  try {
    summary.scoreboard = metrics::score_pipeline(metrics::collect_final_errors(records));
    std::ofstream out(store.root() / "scoreboard.csv");
    metrics::write_scoreboard_csv(out, *summary.scoreboard);
  } catch (const InputError& e) {
    summary.scoreboard_error = e.what();
  }
  return summary;
}

metrics::Scoreboard score_stores(const std::vector<std::filesystem::path>& roots) {
  std::vector<metrics::RunRecord> records;
  for (const auto& root : roots) {
    if (!std::filesystem::exists(root / "manifest.tsv"))
      throw InputError("'" + root.string() + "' is not a result store");
    ResultStore store(root);
    for (auto& r : store.load_records()) records.push_back(std::move(r));
  }
  return metrics::score_pipeline(metrics::collect_final_errors(records));
}

metrics::DiagnosticTrace average_traces(const std::vector<metrics::DiagnosticTrace>& traces) {
  std::size_t length = 0;
  for (const auto& t : traces) length = std::max(length, t.size());
  metrics::DiagnosticTrace out;
  for (std::size_t k = 0; k < length; ++k) {
    struct Acc {
      double sum = 0.0;
      std::size_t n = 0;
      void add(double v) {
        if (!std::isnan(v)) {
          sum += v;
          ++n;
        }
      }
      double mean() const { return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN(); }
    } acc, r2, r2_raw, tau, hv, archive, nfe;
    int generation = 0;
    for (const auto& t : traces) {
      if (k >= t.size()) continue;
      const auto& row = t[k];
      generation = row.generation;
      acc.add(row.accuracy);
      r2.add(row.r2);
      r2_raw.add(row.r2_raw);
      tau.add(row.tau);
      hv.add(row.hypervolume);
      archive.add(static_cast<double>(row.archive_size));
      nfe.add(static_cast<double>(row.nfe));
    }
    metrics::DiagnosticRow row{generation, 0, acc.mean(), r2.mean(), r2_raw.mean(), tau.mean(), hv.mean(), 0};
    row.nfe = static_cast<std::int64_t>(std::llround(nfe.mean()));
    row.archive_size = static_cast<std::size_t>(std::llround(archive.n ? archive.mean() : 0.0));
    out.push_back(row);
  }
  return out;
}

}  // namespace pslshade::harness
