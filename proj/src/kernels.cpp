#include "pslshade/kernels.hpp"

#include "pslshade/features.hpp"

namespace pslshade::kernels {

namespace {

double surrogate_value(std::span<const double> x, const Eigen::VectorXd& coefficients,
                       std::span<const double> center, std::vector<double>& buffer) {
  prescreen::feature_map_into(x, buffer, center);
  double acc = 0.0;
  for (std::size_t k = 0; k < buffer.size(); ++k) acc += coefficients[static_cast<Eigen::Index>(k)] * buffer[k];
  return acc;
}

std::size_t feature_count(std::span<const Vector> points) {
  return points.empty() ? 0 : prescreen::df_mm(points.front().size());
}

}  // namespace

Eigen::MatrixXd design_matrix(std::span<const Vector> points, std::span<const double> center) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const std::size_t cols = feature_count(points);
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(cols));
#pragma omp parallel
  {
    std::vector<double> row(cols);
#pragma omp for schedule(static)
    for (Eigen::Index i = 0; i < rows; ++i) {
      prescreen::feature_map_into(points[static_cast<std::size_t>(i)], row, center);
      for (std::size_t k = 0; k < cols; ++k) x(i, static_cast<Eigen::Index>(k)) = row[k];
    }
  }
  return x;
}

Eigen::MatrixXd design_matrix_serial(std::span<const Vector> points, std::span<const double> center) {
  const auto rows = static_cast<Eigen::Index>(points.size());
  const std::size_t cols = feature_count(points);
  Eigen::MatrixXd x(rows, static_cast<Eigen::Index>(cols));
  std::vector<double> row(cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    prescreen::feature_map_into(points[static_cast<std::size_t>(i)], row, center);
    for (std::size_t k = 0; k < cols; ++k) x(i, static_cast<Eigen::Index>(k)) = row[k];
  }
  return x;
}

std::vector<double> surrogate_values(std::span<const Vector> points, const Eigen::VectorXd& coefficients,
                                     std::span<const double> center) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> out(points.size());
#pragma omp parallel
  {
    std::vector<double> buffer(static_cast<std::size_t>(coefficients.size()));
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      out[static_cast<std::size_t>(i)] = surrogate_value(points[static_cast<std::size_t>(i)], coefficients, center, buffer);
  }
  return out;
}

std::vector<double> surrogate_values_serial(std::span<const Vector> points, const Eigen::VectorXd& coefficients,
                                            std::span<const double> center) {
  std::vector<double> out(points.size());
  std::vector<double> buffer(static_cast<std::size_t>(coefficients.size()));
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = surrogate_value(points[i], coefficients, center, buffer);
  return out;
}

std::vector<double> evaluate_batch(const Objective& objective, std::span<const Vector> points) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  std::vector<double> out(points.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = objective(points[static_cast<std::size_t>(i)]);
  return out;
}

std::vector<double> evaluate_batch_serial(const Objective& objective, std::span<const Vector> points) {
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = objective(points[i]);
  return out;
}

}  // namespace pslshade::kernels
