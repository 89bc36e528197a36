#include "digitime/kernels.hpp"

#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "digitime/errors.hpp"

namespace digitime::kernels {

GroupIndex build_groups(std::span<const std::int64_t> ids, std::size_t n_groups) {
  GroupIndex idx;
  idx.offsets.assign(n_groups + 1, 0);
  for (auto id : ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= n_groups) throw DataError("group id out of range");
    ++idx.offsets[static_cast<std::size_t>(id) + 1];
  }
  for (std::size_t g = 0; g < n_groups; ++g) idx.offsets[g + 1] += idx.offsets[g];
  idx.rows.resize(ids.size());
  std::vector<std::size_t> cursor(idx.offsets.begin(), idx.offsets.end() - 1);
  for (std::size_t i = 0; i < ids.size(); ++i) idx.rows[cursor[static_cast<std::size_t>(ids[i])]++] = i;
  return idx;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > best_v) {
      best_v = values[i];
      best = i;
    }
  }
  return best;
}

namespace {

void demean_group(std::span<double> column, const GroupIndex& groups, std::size_t g,
                  std::span<const double> weights) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = groups.offsets[g]; k < groups.offsets[g + 1]; ++k) {
    std::size_t i = groups.rows[k];
    double w = weights.empty() ? 1.0 : weights[i];
    num += w * column[i];
    den += w;
  }
  if (den <= 0.0) return;
  double mean = num / den;
  for (std::size_t k = groups.offsets[g]; k < groups.offsets[g + 1]; ++k) column[groups.rows[k]] -= mean;
}

void score_group(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, const GroupIndex& groups,
                 std::size_t g, Eigen::MatrixXd& out) {
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double s = 0.0;
    for (std::size_t k = groups.offsets[g]; k < groups.offsets[g + 1]; ++k) {
      auto i = static_cast<Eigen::Index>(groups.rows[k]);
      s += e(i) * X(i, j);
    }
    out(static_cast<Eigen::Index>(g), j) = s;
  }
}

}  // namespace

namespace serial {

void evaluate_points(const PointObjective& f, std::span<const double> points, std::size_t dims,
                     std::span<double> values) {
  for (std::size_t p = 0; p < values.size(); ++p) values[p] = f(points.subspan(p * dims, dims));
}

void demean(std::span<double> column, const GroupIndex& groups, std::span<const double> weights) {
  for (std::size_t g = 0; g < groups.n_groups(); ++g) demean_group(column, groups, g, weights);
}

Eigen::MatrixXd cluster_score_sums(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                   const GroupIndex& groups) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(groups.n_groups()), X.cols());
  for (std::size_t g = 0; g < groups.n_groups(); ++g) score_group(X, e, groups, g, out);
  return out;
}

}  // namespace serial

namespace omp {

void evaluate_points(const PointObjective& f, std::span<const double> points, std::size_t dims,
                     std::span<double> values) {
  const auto n = static_cast<std::int64_t>(values.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n; ++p) {
    auto up = static_cast<std::size_t>(p);
    values[up] = f(points.subspan(up * dims, dims));
  }
}

void demean(std::span<double> column, const GroupIndex& groups, std::span<const double> weights) {
  const auto n = static_cast<std::int64_t>(groups.n_groups());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t g = 0; g < n; ++g) demean_group(column, groups, static_cast<std::size_t>(g), weights);
}

Eigen::MatrixXd cluster_score_sums(const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                   const GroupIndex& groups) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(groups.n_groups()), X.cols());
  const auto n = static_cast<std::int64_t>(groups.n_groups());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t g = 0; g < n; ++g) score_group(X, e, groups, static_cast<std::size_t>(g), out);
  return out;
}

}  // namespace omp

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace digitime::kernels
