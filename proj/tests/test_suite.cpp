#include <cmath>
#include <numbers>
#include <set>

#include "doctest.h"
#include "pslshade/base_functions.hpp"
#include "pslshade/errors.hpp"
#include "pslshade/random.hpp"
#include "pslshade/suite.hpp"

using namespace pslshade;
using namespace pslshade::suite;

namespace {

std::vector<double> random_point(std::size_t dim, Rng& rng, double lo = -100.0, double hi = 100.0) {
  std::vector<double> x(dim);
  for (double& v : x) v = rng.uniform(lo, hi);
  return x;
}

// Straight-line versions of the three pieces of F5, written from the
// textbook formulas rather than shared with the library.
double oracle_schwefel_inside(const std::vector<double>& x) {
  double s = 0.0;
  for (const double xi : x) {
    const double z = 10.0 * xi + 420.9687462275036;
    REQUIRE(std::fabs(z) <= 500.0);
    s += 418.9828872724338 - z * std::sin(std::sqrt(std::fabs(z)));
  }
  return s;
}

double oracle_rastrigin(const std::vector<double>& x) {
  double s = 0.0;
  for (const double xi : x) {
    const double z = xi * 5.12 / 100.0;
    s += z * z + 10.0 - 10.0 * std::cos(2.0 * std::numbers::pi * z);
  }
  return s;
}

double oracle_elliptic(const std::vector<double>& x) {
  double s = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(10.0, 6.0 * static_cast<double>(i) / (n - 1.0)) * x[i] * x[i];
  return s;
}

}  // namespace

TEST_CASE("every suite member reaches its stated optimum for every combo") {
  for (const std::size_t dim : {2u, 5u, 10u, 20u}) {
    for (int id = 1; id <= 10; ++id) {
      for (const Combo combo : kAllCombos) {
        const auto f = make_instance(dim, 99, id, combo);
        CHECK(std::fabs(f.evaluate(f.optimum_point()) - f.optimum_value()) <= 1e-9);
      }
    }
  }
}

TEST_CASE("dimension 2 suite has ten members with consistent optima") {
  for (const std::uint64_t seed : {0ULL, 1ULL, 12345ULL}) {
    const auto suite = make_suite(2, seed);
    REQUIRE(suite.size() == 10);
    for (const auto& f : suite) CHECK(std::fabs(f.evaluate(f.optimum_point()) - f.optimum_value()) <= 1e-9);
  }
}

TEST_CASE("bent cigar is zero at the origin in 20D") {
  const auto suite = make_suite(20, 1);
  const std::vector<double> origin(20, 0.0);
  CHECK(suite[0].evaluate(origin) == 0.0);
  CHECK(suite[0].category() == Category::Unimodal);
}

TEST_CASE("hybrid member matches a straight-line mixture oracle") {
  const auto suite = make_suite(10, 7);
  const auto& f5 = suite[4];
  const auto& layout = f5.info().hybrid;
  REQUIRE(layout.block_sizes == std::vector<std::size_t>{3, 3, 4});
  std::set<std::size_t> seen(layout.permutation.begin(), layout.permutation.end());
  REQUIRE(seen.size() == 10);

  Rng rng(71);
  for (int probe = 0; probe < 50; ++probe) {
    const auto x = random_point(10, rng, -5.0, 5.0);
    std::vector<double> a, b, c;
    for (std::size_t d = 0; d < 3; ++d) a.push_back(x[layout.permutation[d]]);
    for (std::size_t d = 3; d < 6; ++d) b.push_back(x[layout.permutation[d]]);
    for (std::size_t d = 6; d < 10; ++d) c.push_back(x[layout.permutation[d]]);
    const double expected = oracle_schwefel_inside(a) + oracle_rastrigin(b) + oracle_elliptic(c);
    CHECK(f5.evaluate(x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("identity transformation leaves values unchanged") {
  const auto suite = make_suite(6, 3);
  Rng rng(5);
  for (const auto& f : suite) {
    const auto g = apply_transformation(f, make_transformation(Combo::None, 6, 11));
    for (int probe = 0; probe < 100; ++probe) {
      const auto x = random_point(6, rng);
      CHECK(g.evaluate(x) == f.evaluate(x));
    }
  }
}

TEST_CASE("bias and shift put f* + 100 at the shift vector") {
  const auto suite = make_suite(8, 3);
  for (const auto& f : suite) {
    const auto t = make_transformation(Combo::BS, 8, 17);
    CHECK(t.bias == 100.0);
    const auto g = apply_transformation(f, t);
    CHECK(std::fabs(g.evaluate(t.shift) - (f.optimum_value() + 100.0)) <= 1e-9);
  }
}

TEST_CASE("shift plus rotation equals a hand-composed evaluation") {
  const auto suite = make_suite(5, 3);
  Rng rng(19);
  for (const auto& f : suite) {
    const auto t = make_transformation(Combo::SR, 5, 23);
    const auto g = apply_transformation(f, t);
    const Eigen::Map<const Eigen::VectorXd> s(t.shift.data(), 5);
    for (int probe = 0; probe < 20; ++probe) {
      const auto x = random_point(5, rng);
      const Eigen::Map<const Eigen::VectorXd> xv(x.data(), 5);
      const Eigen::VectorXd z = t.rotation * (xv - s);
      const std::vector<double> zs(z.data(), z.data() + 5);
      CHECK(g.evaluate(x) == doctest::Approx(f.evaluate(zs)).epsilon(1e-10));
    }
  }
}

TEST_CASE("rotation matrices") {
  SUBCASE("dimension 1 is the identity") {
    const auto r = random_rotation(1, 42);
    REQUIRE(r.rows() == 1);
    CHECK(r(0, 0) == 1.0);
  }
  SUBCASE("orthogonal with determinant +1") {
    const auto r = random_rotation(5, 3);
    const Eigen::MatrixXd err = r.transpose() * r - Eigen::MatrixXd::Identity(5, 5);
    CHECK(err.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(r.determinant() == doctest::Approx(1.0));
  }
  SUBCASE("deterministic in the seed") {
    CHECK(random_rotation(20, 3) == random_rotation(20, 3));
    CHECK(random_rotation(20, 3) != random_rotation(20, 4));
  }
}

TEST_CASE("rotation leaves the optimum value unchanged") {
  for (int id = 1; id <= 10; ++id) {
    const auto plain = make_instance(10, 5, id, Combo::S);
    const auto rotated = make_instance(10, 5, id, Combo::SR);
    CHECK(plain.optimum_value() == rotated.optimum_value());
    CHECK(make_instance(10, 5, id, Combo::BSR).optimum_value() == make_instance(10, 5, id, Combo::BS).optimum_value());
  }
}

TEST_CASE("evaluations are finite across the search box") {
  Rng rng(8);
  for (int id = 1; id <= 10; ++id) {
    for (const Combo combo : kAllCombos) {
      const auto f = make_instance(10, 1, id, combo);
      for (int probe = 0; probe < 50; ++probe) CHECK(std::isfinite(f.evaluate(random_point(10, rng))));
      CHECK(std::isfinite(f.evaluate(std::vector<double>(10, 100.0))));
      CHECK(std::isfinite(f.evaluate(std::vector<double>(10, -100.0))));
    }
  }
}

TEST_CASE("suite generation is bit-identical for equal seeds") {
  Rng rng(2);
  const auto x = random_point(12, rng);
  const auto a = make_suite(12, 77);
  const auto b = make_suite(12, 77);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].evaluate(x) == b[k].evaluate(x));
    CHECK(a[k].optimum_point() == b[k].optimum_point());
  }
}

TEST_CASE("dimension and id limits are enforced") {
  CHECK_THROWS_AS(make_suite(1, 0), ConfigError);
  CHECK_THROWS_AS(make_suite(101, 0), ConfigError);
  CHECK_NOTHROW(make_suite(100, 0));
  CHECK_THROWS_AS(make_instance(10, 0, 0, Combo::None), ConfigError);
  CHECK_THROWS_AS(make_instance(10, 0, 11, Combo::None), ConfigError);
}

TEST_CASE("combo names round-trip") {
  for (const Combo c : kAllCombos) {
    CHECK(parse_combo(to_string(c)) == c);
    CHECK(parse_combo(combo_token(c)) == c);
  }
  CHECK_THROWS_AS(parse_combo("R"), ConfigError);
}

TEST_CASE("manifest line carries id, category, seed, combo and optimum") {
  const auto f = make_instance(10, 1, 3, Combo::BS);
  const auto line = manifest_line(f, 1);
  CHECK(line.find("id=F3") == 0);
  CHECK(line.find("category=basic") != std::string::npos);
  CHECK(line.find("seed=1") != std::string::npos);
  CHECK(line.find("combo=B+S") != std::string::npos);
  CHECK(line.find("optimum=100") != std::string::npos);
}
