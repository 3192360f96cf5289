#pragma once

#include <span>
#include <vector>

namespace pslshade::prescreen {

/// Degrees of freedom of the full meta-model: (D^2 + 7D)/2 + 1.
constexpr std::size_t df_mm(std::size_t dimension) {
  return (dimension * dimension + 7 * dimension) / 2 + 1;
}

/// Coordinates closer to zero than this are clamped (keeping sign, 0 -> +)
/// before the inverse features are formed.
inline constexpr double kInverseGuard = 1e-12;

/// Writes [1, u, u^2, u_i u_j (i < j, row-major), 1/x, 1/x^2] with
/// u = x - center into `out`, which must hold df_mm(x.size()) values. An
/// empty center means zero. Shifting the polynomial terms leaves their span
/// unchanged but keeps least squares well conditioned far from the origin.
void feature_map_into(std::span<const double> x, std::span<double> out, std::span<const double> center = {});

std::vector<double> feature_map(std::span<const double> x, std::span<const double> center = {});

}  // namespace pslshade::prescreen
