#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in
// `kernels::serial` and an OpenMP version in `kernels::omp`; the two produce
// bit-identical results because every floating-point reduction runs in row
// order within one thread (parallelism is only across groups/points).

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace digitime::kernels {

/// Rows grouped by dense id, CSR layout; rows within a group keep input order.
struct GroupIndex {
  std::vector<std::size_t> offsets;  // size n_groups + 1
  std::vector<std::size_t> rows;

  std::size_t n_groups() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::size_t size(std::size_t g) const { return offsets[g + 1] - offsets[g]; }
};

GroupIndex build_groups(std::span<const std::int64_t> ids, std::size_t n_groups);

using PointObjective = std::function<double(std::span<const double>)>;

/// Index of the largest value, first occurrence on ties; NaN never wins.
std::size_t argmax(std::span<const double> values);

namespace serial {

void evaluate_points(const PointObjective& f, std::span<const double> points, std::size_t dims,
                     std::span<double> values);

/// Subtract the (weighted) group mean from every row; empty weights = unweighted.
void demean(std::span<double> column, const GroupIndex& groups, std::span<const double> weights);

/// Row g holds sum_{i in g} e_i * X_i.
Eigen::MatrixXd cluster_score_sums(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                   const GroupIndex& groups);

}  // namespace serial

namespace omp {

void evaluate_points(const PointObjective& f, std::span<const double> points, std::size_t dims,
                     std::span<double> values);

void demean(std::span<double> column, const GroupIndex& groups, std::span<const double> weights);

Eigen::MatrixXd cluster_score_sums(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                   const GroupIndex& groups);

}  // namespace omp

int max_threads();

}  // namespace digitime::kernels
