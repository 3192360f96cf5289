#include "pslshade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <set>

#include "pslshade/errors.hpp"

namespace pslshade::metrics {

std::vector<std::int64_t> checkpoint_nfes(std::int64_t max_nfe, std::size_t dimension) {
  std::vector<std::int64_t> out;
  out.reserve(kCheckpointCount);
  const double d = static_cast<double>(dimension);
  for (std::size_t k = 0; k < kCheckpointCount; ++k) {
    const double exponent = static_cast<double>(k) / 5.0 - 3.0;
    const double raw = static_cast<double>(max_nfe) * std::pow(d, exponent);
    const double ceiled = std::ceil(raw - 1e-9 * raw);
    out.push_back(std::clamp(static_cast<std::int64_t>(ceiled), std::int64_t{1}, max_nfe));
  }
  return out;
}

double normalized_error(double best, double optimum, double worst_best) {
  if (worst_best < best) throw InputError("worst best-of-runs is smaller than the best");
  if (best < optimum) throw InputError("best value lies below the optimum");
  const double num = best - optimum;
  if (num == 0.0) return 0.0;
  return num / (worst_best - optimum);
}

double hyper_volume(std::span<const std::vector<double>> points) {
  if (points.empty()) return 0.0;
  const std::size_t dim = points.front().size();
  double volume = 1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double lo = points.front()[d];
    double hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p[d]);
      hi = std::max(hi, p[d]);
    }
    volume *= hi - lo;
  }
  return volume;
}

bool selection_accuracy(std::span<const double> values, std::size_t chosen) {
  return values[chosen] == *std::min_element(values.begin(), values.end());
}

std::optional<double> kendall_tau(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("kendall_tau needs lists of equal length");
  const std::size_t n = a.size();
  if (n < 2) return std::nullopt;
  double concordant = 0.0;
  double discordant = 0.0;
  double ties_a = 0.0;
  double ties_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = a[i] - a[j];
      const double db = b[i] - b[j];
      if (da == 0.0) ties_a += 1.0;
      if (db == 0.0) ties_b += 1.0;
      if (da == 0.0 || db == 0.0) continue;
      if ((da > 0.0) == (db > 0.0)) {
        concordant += 1.0;
      } else {
        discordant += 1.0;
      }
    }
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double denom = std::sqrt((pairs - ties_a) * (pairs - ties_b));
  if (denom == 0.0) return std::nullopt;
  return (concordant - discordant) / denom;
}

std::optional<double> r_squared_raw(std::span<const double> fitted, std::span<const double> observed) {
  if (fitted.size() != observed.size()) throw InputError("r_squared needs lists of equal length");
  if (observed.size() < 2) return std::nullopt;
  const double mean =
      std::accumulate(observed.begin(), observed.end(), 0.0) / static_cast<double>(observed.size());
  double ss_tot = 0.0;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
    ss_res += (observed[i] - fitted[i]) * (observed[i] - fitted[i]);
  }
  if (ss_tot == 0.0) return std::nullopt;
  return 1.0 - ss_res / ss_tot;
}

std::optional<double> r_squared(std::span<const double> fitted, std::span<const double> observed) {
  const auto raw = r_squared_raw(fitted, observed);
  if (!raw) return std::nullopt;
  return std::clamp(*raw, 0.0, 1.0);
}

std::vector<double> shared_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the mean of ranks i+1..j+1
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

const ScoreRow& Scoreboard::at(const std::string& algorithm) const {
  for (const auto& row : rows) {
    if (row.algorithm == algorithm) return row;
  }
  throw InputError("algorithm '" + algorithm + "' is not on the scoreboard");
}

Scoreboard score_pipeline(const std::map<std::string, CellErrors>& errors) {
  if (errors.empty()) throw InputError("no algorithms to score");
  const CellErrors& reference = errors.begin()->second;
  if (reference.empty()) throw InputError("no cells to score");
  for (const auto& [name, cells] : errors) {
    if (cells.size() != reference.size())
      throw InputError("ragged cells: '" + name + "' covers a different set of cells");
    for (const auto& [key, reps] : cells) {
      const auto it = reference.find(key);
      if (it == reference.end())
        throw InputError("ragged cells: '" + name + "' covers a different set of cells");
      if (reps.empty() || reps.size() != it->second.size())
        throw InputError("ragged repetitions in '" + name + "' for F" + std::to_string(key.function));
    }
  }

  constexpr double kCellWeight = 0.5;
  const std::size_t algos = errors.size();
  std::vector<ScoreRow> rows;
  for (const auto& [name, cells] : errors) rows.push_back(ScoreRow{name});

  std::vector<double> best(algos);
  std::vector<double> mean(algos);
  for (const auto& [key, unused] : reference) {
    std::size_t a = 0;
    for (const auto& [name, cells] : errors) {
      const auto& reps = cells.at(key);
      best[a] = *std::min_element(reps.begin(), reps.end());
      mean[a] = std::accumulate(reps.begin(), reps.end(), 0.0) / static_cast<double>(reps.size());
      ++a;
    }
    const double worst_best = *std::max_element(best.begin(), best.end());
    const auto ranks = shared_ranks(mean);
    for (std::size_t k = 0; k < algos; ++k) {
      rows[k].sne += kCellWeight * normalized_error(best[k], 0.0, worst_best);
      rows[k].sr += kCellWeight * ranks[k];
    }
  }

  double sne_min = rows.front().sne;
  double sr_min = rows.front().sr;
  for (const auto& r : rows) {
    sne_min = std::min(sne_min, r.sne);
    sr_min = std::min(sr_min, r.sr);
  }
  for (auto& r : rows) {
    r.score1 = r.sne > 0.0 ? (1.0 - (r.sne - sne_min) / r.sne) * 50.0 : 50.0;
    r.score2 = r.sr > 0.0 ? (1.0 - (r.sr - sr_min) / r.sr) * 50.0 : 50.0;
    r.score = r.score1 + r.score2;
  }
  return Scoreboard{std::move(rows)};
}

std::map<std::string, CellErrors> collect_final_errors(std::span<const RunRecord> records) {
  std::map<std::string, CellErrors> out;
  for (const auto& r : records) {
    out[r.algorithm][CellKey{r.function, r.combo, r.dimension}].push_back(r.final_error());
  }
  return out;
}

namespace {

void write_number(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else {
    out << v;
  }
}

}  // namespace

void write_scoreboard_csv(std::ostream& out, const Scoreboard& board) {
  out << "algorithm,SNE,SR,Score1,Score2,Score\n";
  out << std::setprecision(10);
  for (const auto& r : board.rows) {
    out << r.algorithm << ',' << r.sne << ',' << r.sr << ',' << r.score1 << ',' << r.score2 << ','
        << r.score << '\n';
  }
}

void write_diagnostics_csv(std::ostream& out, const DiagnosticTrace& trace) {
  out << "generation,nfe,accuracy,r2,tau,hypervolume,archive_size\n";
  out << std::setprecision(10);
  for (const auto& row : trace) {
    out << row.generation << ',' << row.nfe << ',';
    write_number(out, row.accuracy);
    out << ',';
    write_number(out, row.r2);
    out << ',';
    write_number(out, row.tau);
    out << ',';
    write_number(out, row.hypervolume);
    out << ',' << row.archive_size << '\n';
  }
}

DiagnosticTrace read_diagnostics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "generation,nfe,accuracy,r2,tau,hypervolume,archive_size")
    throw InputError("diagnostics file has an unexpected header");
  DiagnosticTrace trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 7) throw InputError("diagnostics row has " + std::to_string(f.size()) + " fields");
    try {
      DiagnosticRow row;
      row.generation = std::stoi(f[0]);
      row.nfe = std::stoll(f[1]);
      row.accuracy = std::stod(f[2]);
      row.r2 = std::stod(f[3]);
      row.r2_raw = std::nan("");
      row.tau = std::stod(f[4]);
      row.hypervolume = std::stod(f[5]);
      row.archive_size = std::stoul(f[6]);
      trace.push_back(row);
    } catch (const std::logic_error&) {
      throw InputError("malformed diagnostics row: " + line);
    }
  }
  return trace;
}

}  // namespace pslshade::metrics
