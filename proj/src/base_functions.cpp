#include "pslshade/base_functions.hpp"

#include <cmath>
#include <numbers>

namespace pslshade::suite::base {

double bent_cigar(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += x[i] * x[i];
  return x[0] * x[0] + 1e6 * tail;
}

double elliptic(std::span<const double> x) {
  const std::size_t n = x.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double exponent = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    sum += std::pow(1e6, exponent) * x[i] * x[i];
  }
  return sum;
}

double schwefel(std::span<const double> x) {
  constexpr double kOffset = 420.9687462275036;
  constexpr double kPeak = 418.9828872724338;
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (const double xi : x) {
    const double z = 10.0 * xi + kOffset;
    double g;
    if (z > 500.0) {
      const double folded = 500.0 - std::fmod(z, 500.0);
      g = folded * std::sin(std::sqrt(std::fabs(folded))) - (z - 500.0) * (z - 500.0) / (10000.0 * n);
    } else if (z < -500.0) {
      const double folded = std::fmod(std::fabs(z), 500.0) - 500.0;
      g = folded * std::sin(std::sqrt(std::fabs(folded))) - (z + 500.0) * (z + 500.0) / (10000.0 * n);
    } else {
      g = z * std::sin(std::sqrt(std::fabs(z)));
    }
    sum += kPeak - g;
  }
  return sum;
}

double rastrigin(std::span<const double> x) {
  double sum = 0.0;
  for (const double xi : x) {
    const double z = 0.0512 * xi;
    sum += z * z - 10.0 * std::cos(2.0 * std::numbers::pi * z) + 10.0;
  }
  return sum;
}

double rosenbrock(std::span<const double> x) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double zi = 0.02048 * x[i] + 1.0;
    const double zn = 0.02048 * x[i + 1] + 1.0;
    sum += 100.0 * (zi * zi - zn) * (zi * zi - zn) + (zi - 1.0) * (zi - 1.0);
  }
  return sum;
}

double griewank(std::span<const double> x) {
  double sum = 0.0;
  double prod = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = 6.0 * x[i];
    sum += z * z / 4000.0;
    prod *= std::cos(z / std::sqrt(static_cast<double>(i + 1)));
  }
  return sum - prod + 1.0;
}

double ackley(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  double squares = 0.0;
  double cosines = 0.0;
  for (const double xi : x) {
    squares += xi * xi;
    cosines += std::cos(2.0 * std::numbers::pi * xi);
  }
  return -20.0 * std::exp(-0.2 * std::sqrt(squares / n)) - std::exp(cosines / n) + 20.0 + std::numbers::e;
}

double hgbat(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  double squares = 0.0;
  double total = 0.0;
  for (const double xi : x) {
    const double z = 0.05 * xi - 1.0;
    squares += z * z;
    total += z;
  }
  return std::sqrt(std::fabs(squares * squares - total * total)) + (0.5 * squares + total) / n + 0.5;
}

double expanded_schaffer_f6(std::span<const double> x) {
  const std::size_t n = x.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = x[i];
    const double b = x[(i + 1) % n];
    const double r2 = a * a + b * b;
    const double s = std::sin(std::sqrt(r2));
    const double d = 1.0 + 0.001 * r2;
    sum += 0.5 + (s * s - 0.5) / (d * d);
  }
  return sum;
}

}  // namespace pslshade::suite::base
