#pragma once

#include <span>

// Elementary test functions on raw coordinates in roughly [-100, 100].
// Every function has its global minimum at the origin. The value there is 0
// except for schwefel, which is within 1e-9 * n of 0.
namespace pslshade::suite::base {

double bent_cigar(std::span<const double> x);
double elliptic(std::span<const double> x);
double schwefel(std::span<const double> x);
double rastrigin(std::span<const double> x);
double rosenbrock(std::span<const double> x);
double griewank(std::span<const double> x);
double ackley(std::span<const double> x);
double hgbat(std::span<const double> x);
double expanded_schaffer_f6(std::span<const double> x);

}  // namespace pslshade::suite::base
