#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

// Data-parallel kernels of the pre-screening step. Each kernel has an OpenMP
// version used by the engines and a serial reference used by the tests; both
// produce bit-identical results because every output element is computed by
// the same scalar code.
namespace pslshade::kernels {

using Vector = std::vector<double>;
using Objective = std::function<double(std::span<const double>)>;

/// Rows are feature_map(points[i], center).
Eigen::MatrixXd design_matrix(std::span<const Vector> points, std::span<const double> center = {});
Eigen::MatrixXd design_matrix_serial(std::span<const Vector> points, std::span<const double> center = {});

/// coefficients . feature_map(points[i], center) for every point.
std::vector<double> surrogate_values(std::span<const Vector> points, const Eigen::VectorXd& coefficients,
                                     std::span<const double> center = {});
std::vector<double> surrogate_values_serial(std::span<const Vector> points, const Eigen::VectorXd& coefficients,
                                            std::span<const double> center = {});

/// True objective values for every point. The objective must be safe to call
/// concurrently.
std::vector<double> evaluate_batch(const Objective& objective, std::span<const Vector> points);
std::vector<double> evaluate_batch_serial(const Objective& objective, std::span<const Vector> points);

}  // namespace pslshade::kernels
