#include "pslshade/prescreen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pslshade/kernels.hpp"

namespace pslshade::prescreen {

namespace {

double guarded(double v) {
  if (std::fabs(v) >= kInverseGuard) return v;
  return v < 0.0 ? -kInverseGuard : kInverseGuard;
}

}  // namespace

void feature_map_into(std::span<const double> x, std::span<double> out, std::span<const double> center) {
  const std::size_t n = x.size();
  auto u = [&](std::size_t d) { return center.empty() ? x[d] : x[d] - center[d]; };
  std::size_t k = 0;
  out[k++] = 1.0;
  for (std::size_t d = 0; d < n; ++d) out[k++] = u(d);
  for (std::size_t d = 0; d < n; ++d) out[k++] = u(d) * u(d);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) out[k++] = u(a) * u(b);
  for (std::size_t d = 0; d < n; ++d) out[k++] = 1.0 / guarded(x[d]);
  for (std::size_t d = 0; d < n; ++d) {
    const double g = guarded(x[d]);
    out[k++] = 1.0 / (g * g);
  }
}

std::vector<double> feature_map(std::span<const double> x, std::span<const double> center) {
  std::vector<double> out(df_mm(x.size()));
  feature_map_into(x, out, center);
  return out;
}

std::vector<Vector> lhs_init(std::size_t n, const SearchBounds& bounds, Rng& rng) {
  const std::size_t dim = bounds.dimension();
  std::vector<Vector> points(n, Vector(dim));
  std::vector<std::size_t> strata(n);
  for (std::size_t d = 0; d < dim; ++d) {
    std::iota(strata.begin(), strata.end(), std::size_t{0});
    for (std::size_t i = n; i > 1; --i) std::swap(strata[i - 1], strata[rng.index(i)]);
    const double width = (bounds.upper[d] - bounds.lower[d]) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      points[i][d] = bounds.lower[d] + width * static_cast<double>(strata[i]) + width * rng.uniform();
    }
  }
  return points;
}

bool SampleArchive::has_similar(std::span<const double> position, double fitness) const {
  for (const auto& e : entries_) {
    if (std::fabs(e.fitness - fitness) <= kSimilarityTolerance) return true;
    bool same = true;
    for (std::size_t d = 0; d < position.size() && same; ++d)
      same = std::fabs(e.position[d] - position[d]) <= kSimilarityTolerance;
    if (same) return true;
  }
  return false;
}

double SampleArchive::worst_fitness() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& e : entries_) worst = std::max(worst, e.fitness);
  return worst;
}

SampleArchive::Outcome SampleArchive::insert(std::span<const double> position, double fitness) {
  if (has_similar(position, fitness)) return Outcome::RejectedSimilar;
  if (entries_.size() < capacity_) {
    entries_.push_back(Entry{Vector(position.begin(), position.end()), fitness});
    return Outcome::Inserted;
  }
  if (entries_.empty()) return Outcome::RejectedWorse;
  const auto worst = std::max_element(entries_.begin(), entries_.end(),
                                      [](const Entry& a, const Entry& b) { return a.fitness < b.fitness; });
  if (!(fitness < worst->fitness)) return Outcome::RejectedWorse;
  *worst = Entry{Vector(position.begin(), position.end()), fitness};
  return Outcome::ReplacedWorst;
}

double MetaModel::predict(std::span<const double> x) const {
  const auto features = feature_map(x, center_);
  double acc = 0.0;
  for (std::size_t k = 0; k < features.size(); ++k) acc += coefficients_[static_cast<Eigen::Index>(k)] * features[k];
  return acc;
}

MetaModel MetaModel::from_coefficients(Eigen::VectorXd coefficients, std::size_t dimension, Vector center) {
  if (static_cast<std::size_t>(coefficients.size()) != df_mm(dimension))
    throw InputError("coefficient count does not match the feature map");
  if (!center.empty() && center.size() != dimension) throw InputError("center has the wrong dimension");
  MetaModel m(dimension);
  m.coefficients_ = std::move(coefficients);
  m.center_ = std::move(center);
  m.fitted_ = true;
  m.rank_ = df_mm(dimension);
  return m;
}

MetaModel fit(std::span<const Vector> points, std::span<const double> values) {
  if (points.size() != values.size()) throw InputError("fit needs one value per point");
  if (points.empty()) return MetaModel{};
  const std::size_t dim = points.front().size();
  MetaModel model(dim);
  const std::size_t p = df_mm(dim);
  if (points.size() < p) return model;

  // Polynomial terms are expanded around the sample mean.
  Vector center(dim, 0.0);
  for (const auto& pt : points)
    for (std::size_t d = 0; d < dim; ++d) center[d] += pt[d];
  for (double& c : center) c /= static_cast<double>(points.size());

  Eigen::MatrixXd x = kernels::design_matrix(points, center);
  Eigen::VectorXd scale(static_cast<Eigen::Index>(p));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double m = x.col(c).cwiseAbs().maxCoeff();
    scale[c] = m > 0.0 ? m : 1.0;
    x.col(c) /= scale[c];
  }
  const Eigen::Map<const Eigen::VectorXd> y(values.data(), static_cast<Eigen::Index>(values.size()));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x.rows(), x.cols());
  qr.setThreshold(kRankThreshold);
  qr.compute(x);
  const Eigen::Index rank = qr.rank();

  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  if (rank > 0) {
    Eigen::VectorXd qty = y;
    qty.applyOnTheLeft(qr.householderQ().setLength(rank).adjoint());
    const Eigen::VectorXd z = qr.matrixQR()
                                  .topLeftCorner(rank, rank)
                                  .triangularView<Eigen::Upper>()
                                  .solve(qty.head(rank));
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < rank; ++i) scaled[perm[i]] = z[i];
  }
  model.coefficients_ = scaled.cwiseQuotient(scale);
  model.center_ = std::move(center);
  model.fitted_ = true;
  model.rank_ = static_cast<std::size_t>(rank);

  const Eigen::VectorXd fitted_values = x * scaled;
  const std::span<const double> fitted_span(fitted_values.data(), static_cast<std::size_t>(fitted_values.size()));
  const auto raw = metrics::r_squared_raw(fitted_span, values);
  model.r2_raw_ = raw.value_or(std::numeric_limits<double>::quiet_NaN());
  model.r2_ = raw ? std::clamp(*raw, 0.0, 1.0) : std::numeric_limits<double>::quiet_NaN();
  return model;
}

MetaModel fit(const SampleArchive& archive) {
  std::vector<Vector> points;
  std::vector<double> values;
  points.reserve(archive.size());
  values.reserve(archive.size());
  for (const auto& e : archive.entries()) {
    points.push_back(e.position);
    values.push_back(e.fitness);
  }
  return fit(points, values);
}

std::size_t argmin_first(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t j = 1; j < values.size(); ++j) {
    if (values[j] < values[best]) best = j;
  }
  return best;
}

std::size_t screen(std::span<const Vector> trials, const MetaModel& model) {
  if (trials.empty()) throw InputError("screening needs at least one trial");
  if (trials.size() == 1) return 0;
  if (!model.fitted()) throw InvariantViolation("screening with an unfitted meta-model");
  return argmin_first(kernels::surrogate_values(trials, model.coefficients(), model.center()));
}

ScreenedTrials generate_screened_trials(std::size_t i, const EngineState& state, std::size_t ns, Rng& rng) {
  const auto& pop = state.population;
  const auto& parent = pop.members[i].position;
  ScreenedTrials out;
  out.draws = de::draw_trial_state(state.memory, state.bounds.dimension(), rng);
  out.f.reserve(ns);
  out.trials.reserve(ns);
  const double slot_f = state.memory.f(out.draws.memory_slot);
  for (std::size_t j = 0; j < ns; ++j) {
    const double f = de::sample_f(slot_f, rng);
    const de::Donors donors =
        de::pick_donors(i, state.ranking, state.pbest_pool, pop.size(), state.archive.size(), rng);
    const Vector v = de::mutate(parent, pop.members[donors.pbest].position, pop.members[donors.r1].position,
                                de::union_member(pop, state.archive, donors.r2), f);
    Vector u = de::crossover(parent, v, out.draws.cr, out.draws.forced, out.draws.crossover_draws);
    de::repair_bounds(u, parent, state.bounds);
    out.f.push_back(f);
    out.trials.push_back(std::move(u));
  }
  return out;
}

std::size_t ScreeningConfig::resolved_capacity(std::size_t dimension) const {
  return archive_capacity == 0 ? 2 * df_mm(dimension) : archive_capacity;
}

void ScreeningConfig::validate(std::size_t dimension) const {
  if (ns < 1) throw ConfigError("N_s must be at least 1");
  if (resolved_capacity(dimension) < df_mm(dimension))
    throw ConfigError("sample archive capacity must be at least df_mm");
}

}  // namespace pslshade::prescreen
