#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pslshade::suite {

enum class Category { Unimodal, Basic, Hybrid, Composition };

/// Transformation combinations applied on top of a base function.
enum class Combo { None, S, BS, SR, BSR };

inline constexpr std::array<Combo, 5> kAllCombos{Combo::None, Combo::S, Combo::BS, Combo::SR,
                                                 Combo::BSR};
inline constexpr double kComboBias = 100.0;
inline constexpr double kShiftRange = 80.0;
inline constexpr std::size_t kSuiteSize = 10;
inline constexpr std::size_t kMinDimension = 2;
inline constexpr std::size_t kMaxDimension = 100;

std::string_view to_string(Category c);
/// Canonical names: "none", "S", "B+S", "S+R", "B+S+R".
std::string_view to_string(Combo c);
/// Filesystem-safe token: "none", "S", "BS", "SR", "BSR".
std::string_view combo_token(Combo c);
/// Accepts canonical names and tokens.
Combo parse_combo(std::string_view text);

struct SearchBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static SearchBounds cube(std::size_t dimension, double lo = -100.0, double hi = 100.0);
  std::size_t dimension() const { return lower.size(); }
  /// Throws ConfigError unless lower[d] < upper[d] for every d.
  void validate() const;
};

using EvalFn = std::function<double(std::span<const double>)>;

/// Dimension layout of a hybrid function: coordinates are permuted, then
/// consecutive blocks of the permuted vector feed one component each.
struct HybridLayout {
  std::vector<std::size_t> permutation;
  std::vector<std::size_t> block_sizes;
};

/// One component of a composition function.
struct CompositionComponent {
  std::vector<double> optimum;
  double sigma;
  double lambda;
  double bias;
};

struct FunctionInfo {
  int id = 0;
  Category category = Category::Unimodal;
  std::size_t dimension = 0;
  double optimum_value = 0.0;
  std::vector<double> optimum_point;
  Combo combo = Combo::None;
  std::uint64_t transform_seed = 0;
  HybridLayout hybrid;
  std::vector<CompositionComponent> components;
};

/// An immutable bound-constrained test function with a known optimum.
/// Copies share the evaluation closure, so concurrent evaluation is safe.
class ObjectiveFunction {
 public:
  ObjectiveFunction(FunctionInfo info, EvalFn fn)
      : info_(std::move(info)), fn_(std::make_shared<const EvalFn>(std::move(fn))) {}

  const FunctionInfo& info() const { return info_; }
  int id() const { return info_.id; }
  Category category() const { return info_.category; }
  std::size_t dimension() const { return info_.dimension; }
  double optimum_value() const { return info_.optimum_value; }
  const std::vector<double>& optimum_point() const { return info_.optimum_point; }
  Combo combo() const { return info_.combo; }

  double evaluate(std::span<const double> x) const { return (*fn_)(x); }
  double operator()(std::span<const double> x) const { return evaluate(x); }

 private:
  FunctionInfo info_;
  std::shared_ptr<const EvalFn> fn_;
};

struct TransformationSpec {
  Combo combo = Combo::None;
  double bias = 0.0;
  std::vector<double> shift;
  Eigen::MatrixXd rotation;
  std::uint64_t seed = 0;

  std::size_t dimension() const { return shift.size(); }
  static TransformationSpec identity(std::size_t dimension);
};

/// Haar-distributed rotation with determinant +1, deterministic in seed.
Eigen::MatrixXd random_rotation(std::size_t dimension, std::uint64_t seed);

/// Seeded instance of a transformation combination. Shifts are uniform in
/// [-80, 80]^D and the bias is 100 when the combination includes B.
TransformationSpec make_transformation(Combo combo, std::size_t dimension, std::uint64_t seed);

/// evaluate(x) = f(R (x - S)) + B.
ObjectiveFunction apply_transformation(const ObjectiveFunction& f, const TransformationSpec& t);

/// The ten untransformed suite members F1..F10.
std::vector<ObjectiveFunction> make_suite(std::size_t dimension, std::uint64_t seed);

/// Seed of the transformation instance used for (function, combo, dimension).
std::uint64_t instance_seed(std::uint64_t suite_seed, int function_id, Combo combo,
                            std::size_t dimension);

/// Suite member `function_id` (1-based) with the seeded instance of `combo`.
ObjectiveFunction make_instance(std::size_t dimension, std::uint64_t suite_seed, int function_id,
                                Combo combo);

/// One manifest line per function: id, category, dimension, seed, combo, optimum.
std::string manifest_line(const ObjectiveFunction& f, std::uint64_t suite_seed);

}  // namespace pslshade::suite
