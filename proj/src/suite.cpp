#include "pslshade/suite.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "pslshade/base_functions.hpp"
#include "pslshade/errors.hpp"
#include "pslshade/random.hpp"

namespace pslshade::suite {

namespace {

using BaseFn = double (*)(std::span<const double>);

struct ComponentSpec {
  BaseFn fn;
  double lambda;
};

constexpr std::array<double, 3> kHybridShares{0.3, 0.3, 0.4};
constexpr std::array<double, 3> kCompositionSigma{10.0, 20.0, 30.0};
constexpr std::array<double, 3> kCompositionBias{0.0, 100.0, 200.0};

std::vector<std::size_t> hybrid_blocks(std::size_t dimension) {
  std::vector<std::size_t> sizes(kHybridShares.size());
  std::size_t used = 0;
  for (std::size_t b = 0; b + 1 < sizes.size(); ++b) {
    sizes[b] = static_cast<std::size_t>(std::lround(kHybridShares[b] * static_cast<double>(dimension)));
    used += sizes[b];
  }
  sizes.back() = dimension - used;
  return sizes;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);
  return perm;
}

ObjectiveFunction finish(FunctionInfo info, EvalFn fn) {
  info.optimum_point.assign(info.dimension, 0.0);
  info.optimum_value = fn(info.optimum_point);
  return ObjectiveFunction(std::move(info), std::move(fn));
}

ObjectiveFunction make_simple(int id, Category category, std::size_t dimension, BaseFn fn) {
  FunctionInfo info;
  info.id = id;
  info.category = category;
  info.dimension = dimension;
  return finish(std::move(info), [fn](std::span<const double> x) { return fn(x); });
}

ObjectiveFunction make_hybrid(int id, std::size_t dimension, std::array<BaseFn, 3> parts,
                              std::uint64_t seed) {
  Rng rng(seed);
  FunctionInfo info;
  info.id = id;
  info.category = Category::Hybrid;
  info.dimension = dimension;
  info.hybrid.permutation = seeded_permutation(dimension, rng);
  info.hybrid.block_sizes = hybrid_blocks(dimension);

  auto fn = [parts, layout = info.hybrid](std::span<const double> x) {
    std::vector<double> permuted(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) permuted[d] = x[layout.permutation[d]];
    double sum = 0.0;
    std::size_t offset = 0;
    for (std::size_t b = 0; b < parts.size(); ++b) {
      const std::size_t len = layout.block_sizes[b];
      sum += parts[b](std::span<const double>(permuted).subspan(offset, len));
      offset += len;
    }
    return sum;
  };
  return finish(std::move(info), std::move(fn));
}

ObjectiveFunction make_composition(int id, std::size_t dimension, std::array<ComponentSpec, 3> parts,
                                   std::uint64_t seed) {
  Rng rng(seed);
  FunctionInfo info;
  info.id = id;
  info.category = Category::Composition;
  info.dimension = dimension;
  std::array<BaseFn, 3> fns{};
  for (std::size_t k = 0; k < parts.size(); ++k) {
    CompositionComponent c;
    c.optimum.assign(dimension, 0.0);
    // The first component carries the global optimum at the origin.
    if (k > 0) {
      for (double& v : c.optimum) v = rng.uniform(-kShiftRange, kShiftRange);
    }
    c.sigma = kCompositionSigma[k];
    c.lambda = parts[k].lambda;
    c.bias = kCompositionBias[k];
    info.components.push_back(std::move(c));
    fns[k] = parts[k].fn;
  }

  auto fn = [fns, comps = info.components](std::span<const double> x) {
    const std::size_t n = x.size();
    std::array<double, 3> weights{};
    std::array<double, 3> values{};
    std::vector<double> local(n);
    int exact = -1;
    for (std::size_t k = 0; k < comps.size(); ++k) {
      double dist2 = 0.0;
      for (std::size_t d = 0; d < n; ++d) {
        local[d] = x[d] - comps[k].optimum[d];
        dist2 += local[d] * local[d];
      }
      values[k] = comps[k].lambda * fns[k](local) + comps[k].bias;
      if (dist2 == 0.0) {
        if (exact < 0) exact = static_cast<int>(k);
        weights[k] = 0.0;
      } else {
        const double sigma = comps[k].sigma;
        weights[k] = std::exp(-dist2 / (2.0 * static_cast<double>(n) * sigma * sigma)) / std::sqrt(dist2);
      }
    }
    if (exact >= 0) return values[static_cast<std::size_t>(exact)];
    double wsum = 0.0;
    for (const double w : weights) wsum += w;
    if (wsum == 0.0) {
      double sum = 0.0;
      for (const double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    }
    double total = 0.0;
    for (std::size_t k = 0; k < comps.size(); ++k) total += weights[k] / wsum * values[k];
    return total;
  };
  return finish(std::move(info), std::move(fn));
}

}  // namespace

std::string_view to_string(Category c) {
  switch (c) {
    case Category::Unimodal: return "unimodal";
    case Category::Basic: return "basic";
    case Category::Hybrid: return "hybrid";
    case Category::Composition: return "composition";
  }
  return "?";
}

std::string_view to_string(Combo c) {
  switch (c) {
    case Combo::None: return "none";
    case Combo::S: return "S";
    case Combo::BS: return "B+S";
    case Combo::SR: return "S+R";
    case Combo::BSR: return "B+S+R";
  }
  return "?";
}

std::string_view combo_token(Combo c) {
  switch (c) {
    case Combo::None: return "none";
    case Combo::S: return "S";
    case Combo::BS: return "BS";
    case Combo::SR: return "SR";
    case Combo::BSR: return "BSR";
  }
  return "?";
}

Combo parse_combo(std::string_view text) {
  for (const Combo c : kAllCombos) {
    if (text == to_string(c) || text == combo_token(c)) return c;
  }
  throw ConfigError("unknown transformation combo '" + std::string(text) + "'");
}

SearchBounds SearchBounds::cube(std::size_t dimension, double lo, double hi) {
  return SearchBounds{std::vector<double>(dimension, lo), std::vector<double>(dimension, hi)};
}

void SearchBounds::validate() const {
  if (lower.size() != upper.size() || lower.empty())
    throw ConfigError("search bounds must be non-empty and of equal length");
  for (std::size_t d = 0; d < lower.size(); ++d) {
    if (!(lower[d] < upper[d])) throw ConfigError("search bounds require lower < upper");
  }
}

TransformationSpec TransformationSpec::identity(std::size_t dimension) {
  TransformationSpec t;
  t.shift.assign(dimension, 0.0);
  t.rotation = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension),
                                         static_cast<Eigen::Index>(dimension));
  return t;
}

Eigen::MatrixXd random_rotation(std::size_t dimension, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(dimension);
  Rng rng(seed);
  Eigen::MatrixXd gauss(n, n);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r) gauss(r, c) = rng.normal(0.0, 1.0);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < n; ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

TransformationSpec make_transformation(Combo combo, std::size_t dimension, std::uint64_t seed) {
  TransformationSpec t = TransformationSpec::identity(dimension);
  t.combo = combo;
  t.seed = seed;
  if (combo == Combo::None) return t;

  Rng rng(combine_seed(seed, 0x5348494654ULL));
  for (double& s : t.shift) s = rng.uniform(-kShiftRange, kShiftRange);
  if (combo == Combo::BS || combo == Combo::BSR) t.bias = kComboBias;
  if (combo == Combo::SR || combo == Combo::BSR)
    t.rotation = random_rotation(dimension, combine_seed(seed, 0x524f54ULL));
  return t;
}

ObjectiveFunction apply_transformation(const ObjectiveFunction& f, const TransformationSpec& t) {
  const std::size_t n = f.dimension();
  if (t.shift.size() != n || static_cast<std::size_t>(t.rotation.rows()) != n ||
      static_cast<std::size_t>(t.rotation.cols()) != n)
    throw ConfigError("transformation dimension does not match function dimension");

  const bool rotated = !t.rotation.isIdentity(0.0);
  FunctionInfo info = f.info();
  info.combo = t.combo;
  info.transform_seed = t.seed;
  info.optimum_value = f.optimum_value() + t.bias;
  // R (x* - S) = x*_base  =>  x* = S + R^T x*_base
  info.optimum_point.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = t.shift[i];
    for (std::size_t k = 0; k < n; ++k)
      acc += t.rotation(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) * f.optimum_point()[k];
    info.optimum_point[i] = rotated ? acc : t.shift[i] + f.optimum_point()[i];
  }

  auto fn = [base = f, shift = t.shift, rotation = t.rotation, bias = t.bias,
             rotated](std::span<const double> x) {
    const std::size_t dim = shift.size();
    std::vector<double> centered(dim);
    for (std::size_t d = 0; d < dim; ++d) centered[d] = x[d] - shift[d];
    if (!rotated) return base.evaluate(centered) + bias;
    std::vector<double> z(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c)
        acc += rotation(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * centered[c];
      z[r] = acc;
    }
    return base.evaluate(z) + bias;
  };
  return ObjectiveFunction(std::move(info), std::move(fn));
}

std::vector<ObjectiveFunction> make_suite(std::size_t dimension, std::uint64_t seed) {
  if (dimension < kMinDimension || dimension > kMaxDimension)
    throw ConfigError("suite dimension must lie in [2, 100], got " + std::to_string(dimension));

  using namespace base;
  auto sub = [seed](int id) { return combine_seed(seed, static_cast<std::uint64_t>(id)); };
  std::vector<ObjectiveFunction> suite;
  suite.reserve(kSuiteSize);
  suite.push_back(make_simple(1, Category::Unimodal, dimension, bent_cigar));
  suite.push_back(make_simple(2, Category::Basic, dimension, schwefel));
  suite.push_back(make_simple(3, Category::Basic, dimension, rastrigin));
  suite.push_back(make_simple(4, Category::Basic, dimension, rosenbrock));
  suite.push_back(make_hybrid(5, dimension, {schwefel, rastrigin, elliptic}, sub(5)));
  suite.push_back(make_hybrid(6, dimension, {expanded_schaffer_f6, hgbat, rosenbrock}, sub(6)));
  suite.push_back(make_hybrid(7, dimension, {griewank, ackley, bent_cigar}, sub(7)));
  suite.push_back(make_composition(8, dimension, {{{rastrigin, 1.0}, {griewank, 10.0}, {schwefel, 1.0}}},
                                   sub(8)));
  suite.push_back(make_composition(9, dimension, {{{ackley, 10.0}, {elliptic, 1e-6}, {griewank, 1.0}}},
                                   sub(9)));
  suite.push_back(make_composition(10, dimension, {{{schwefel, 1.0}, {rastrigin, 10.0}, {elliptic, 1e-6}}},
                                   sub(10)));
  return suite;
}

std::uint64_t instance_seed(std::uint64_t suite_seed, int function_id, Combo combo,
                            std::size_t dimension) {
  std::uint64_t s = combine_seed(suite_seed, 0x494e5354ULL);
  s = combine_seed(s, static_cast<std::uint64_t>(function_id));
  s = combine_seed(s, static_cast<std::uint64_t>(combo));
  return combine_seed(s, dimension);
}

ObjectiveFunction make_instance(std::size_t dimension, std::uint64_t suite_seed, int function_id,
                                Combo combo) {
  if (function_id < 1 || function_id > static_cast<int>(kSuiteSize))
    throw ConfigError("function id must lie in [1, 10], got " + std::to_string(function_id));
  auto suite = make_suite(dimension, suite_seed);
  const auto& base = suite[static_cast<std::size_t>(function_id - 1)];
  return apply_transformation(
      base, make_transformation(combo, dimension, instance_seed(suite_seed, function_id, combo, dimension)));
}

std::string manifest_line(const ObjectiveFunction& f, std::uint64_t suite_seed) {
  std::ostringstream out;
  out << "id=F" << f.id() << " category=" << to_string(f.category()) << " dim=" << f.dimension()
      << " seed=" << suite_seed << " combo=" << to_string(f.combo())
      << " transform_seed=" << f.info().transform_seed << " optimum=" << std::setprecision(17)
      << f.optimum_value();
  return out.str();
}

}  // namespace pslshade::suite
