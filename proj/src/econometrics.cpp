#include "digitime/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "digitime/errors.hpp"
#include "digitime/kernels.hpp"

namespace digitime::econ {

namespace {

constexpr double kRankThreshold = 1e-9;
constexpr double kWeakInstrumentF = 10.0;

struct LsFit {
  Eigen::VectorXd beta;
  Eigen::MatrixXd bread;  // (X'X)^{-1}
};

LsFit ls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names) {
  const auto k = X.cols();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < k) {
    std::vector<std::string> collinear;
    const auto& perm = qr.colsPermutation().indices();
    for (auto j = qr.rank(); j < k; ++j) collinear.push_back(names[static_cast<std::size_t>(perm(j))]);
    std::sort(collinear.begin(), collinear.end());
    std::string msg = "design matrix is rank deficient; collinear:";
    for (const auto& c : collinear) msg += " " + c;
    throw RankError(msg, collinear);
  }
  LsFit fit;
  fit.beta = qr.solve(y);
  Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  Eigen::MatrixXd bread_perm = r_inv * r_inv.transpose();
  const auto& p = qr.colsPermutation();
  fit.bread = p * bread_perm * p.transpose();
  return fit;
}

struct Prepared {
  Eigen::VectorXd y;
  Eigen::MatrixXd exog;  // demeaned, sqrt-weighted
  Eigen::VectorXd endog;
  Eigen::VectorXd instrument;
  std::vector<DenseKey> clusters;
  std::size_t absorbed = 0;
  std::size_t n = 0;
};

std::size_t absorbed_levels(const Frame& data, const std::vector<KeyColumns>& keys) {
  if (keys.empty()) return 0;
  std::size_t levels = 0;
  for (const auto& k : keys) levels += composite_key(data, k).n_levels;
  return levels - (keys.size() - 1);
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Prepared prepare(const RegressionSpec& spec, const Frame& data) {
  spec.validate();
  std::vector<std::string> cols{spec.outcome};
  for (const auto& r : spec.regressors) cols.push_back(r);
  if (spec.endogenous) cols.push_back(*spec.endogenous);
  if (spec.instrument && *spec.instrument != spec.endogenous.value_or("")) cols.push_back(*spec.instrument);
  for (const auto& c : cols) {
    for (double v : data.col(c))
      if (!std::isfinite(v)) throw DataError("non-finite value in column '" + c + "'");
  }
  if (data.rows() == 0) throw DataError("no observations");

  std::vector<double> weights;
  if (spec.weights) {
    weights = data.col(*spec.weights);
    for (double w : weights)
      if (!(w > 0.0) || !std::isfinite(w)) throw DataError("weights must be positive");
  }

  Frame demeaned = spec.fixed_effects.empty() ? data : absorb(data, cols, spec.fixed_effects, weights);

  Prepared p;
  p.n = data.rows();
  p.absorbed = absorbed_levels(data, spec.fixed_effects);
  Eigen::VectorXd sw = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(p.n));
  if (!weights.empty()) sw = to_vector(weights).cwiseSqrt();

  p.y = to_vector(demeaned.col(spec.outcome)).cwiseProduct(sw);
  p.exog.resize(static_cast<Eigen::Index>(p.n), static_cast<Eigen::Index>(spec.regressors.size()));
  for (std::size_t j = 0; j < spec.regressors.size(); ++j)
    p.exog.col(static_cast<Eigen::Index>(j)) = to_vector(demeaned.col(spec.regressors[j])).cwiseProduct(sw);
  if (spec.endogenous) p.endog = to_vector(demeaned.col(*spec.endogenous)).cwiseProduct(sw);
  if (spec.instrument) p.instrument = to_vector(demeaned.col(*spec.instrument)).cwiseProduct(sw);
  for (const auto& c : spec.clusters) p.clusters.push_back(composite_key(data, c));
  return p;
}

Eigen::MatrixXd sandwich(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& meat) {
  Eigen::MatrixXd v = bread * meat * bread;
  return 0.5 * (v + v.transpose());
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                           const std::vector<DenseKey>& clusters, std::size_t n_params, std::string& dof,
                           std::vector<std::size_t>& n_clusters) {
  const auto n = static_cast<std::size_t>(X.rows());
  std::ostringstream os;
  if (clusters.empty()) {
    double factor = static_cast<double>(n) / static_cast<double>(n - n_params);
    os << "HC1: N/(N-K) with N=" << n << ", K=" << n_params;
    dof = os.str();
    return sandwich(bread, hc0_meat(X, e)) * factor;
  }
  if (clusters.size() == 1) {
    const auto& key = clusters[0];
    n_clusters = {key.n_levels};
    double factor = cr1_factor(key.n_levels, n, n_params);
    os << "CR1: G/(G-1)*(N-1)/(N-K) with G=" << key.n_levels << ", N=" << n << ", K=" << n_params;
    dof = os.str();
    return sandwich(bread, cluster_meat(X, e, key.ids, key.n_levels)) * factor;
  }
  auto tw = two_way_covariance(bread, X, e, clusters[0], clusters[1], n_params);
  n_clusters = {clusters[0].n_levels, clusters[1].n_levels};
  os << "two-way CR1 (each component G/(G-1)*(N-1)/(N-K)), G=(" << clusters[0].n_levels << ","
     << clusters[1].n_levels << "), N=" << n << ", K=" << n_params << ", eigenvalues clipped at 0";
  dof = os.str();
  return tw.repaired;
}

void finish(RegressionResult& r) {
  r.std_errors = r.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  r.t_stats = r.coefficients.cwiseQuotient(r.std_errors);
}

}  // namespace

void RegressionSpec::validate() const {
  if (outcome.empty()) throw ConfigError("regression needs an outcome column");
  if (endogenous.has_value() != instrument.has_value())
    throw ConfigError("endogenous regressor and instrument must be given together");
  if (clusters.size() > 2) throw ConfigError("at most two cluster keys are supported");
}

std::size_t RegressionResult::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw DataError("no coefficient named '" + name + "'");
}

Frame within_transform(const Frame& data, const std::vector<std::string>& columns, const KeyColumns& fe_key,
                       const std::vector<double>& weights) {
  DenseKey key = composite_key(data, fe_key);
  auto groups = kernels::build_groups(key.ids, key.n_levels);
  Frame out = data;
  for (const auto& c : columns) kernels::omp::demean(out.col(c), groups, weights);
  return out;
}

Frame absorb(const Frame& data, const std::vector<std::string>& columns, const std::vector<KeyColumns>& keys,
             const std::vector<double>& weights, double tol, int max_iter) {
  if (keys.size() == 1) return within_transform(data, columns, keys[0], weights);
  std::vector<kernels::GroupIndex> groups;
  for (const auto& k : keys) {
    DenseKey key = composite_key(data, k);
    groups.push_back(kernels::build_groups(key.ids, key.n_levels));
  }
  Frame out = data;
  for (const auto& c : columns) {
    auto& col = out.col(c);
    double scale = 0.0;
    for (double v : col) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) continue;
    std::vector<double> prev;
    int it = 0;
    for (; it < max_iter; ++it) {
      prev = col;
      for (const auto& g : groups) kernels::omp::demean(col, g, weights);
      double change = 0.0;
      for (std::size_t i = 0; i < col.size(); ++i) change = std::max(change, std::abs(col[i] - prev[i]));
      if (change <= tol * scale) break;
    }
    if (it == max_iter) throw ConvergenceError("alternating projections did not converge for '" + c + "'", 0.0);
  }
  return out;
}

Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, std::span<const std::int64_t> ids,
                             std::size_t n_groups) {
  auto groups = kernels::build_groups(ids, n_groups);
  Eigen::MatrixXd scores = kernels::omp::cluster_score_sums(X, e, groups);
  return scores.transpose() * scores;
}

Eigen::MatrixXd hc0_meat(const Eigen::MatrixXd& X, const Eigen::VectorXd& e) {
  Eigen::MatrixXd scaled = X.array().colwise() * e.array();
  return scaled.transpose() * scaled;
}

double cr1_factor(std::size_t n_clusters, std::size_t n_obs, std::size_t n_params) {
  if (n_clusters < 2) throw DataError("clustered covariance needs at least two clusters");
  if (n_obs <= n_params) throw DataError("not enough observations for the number of parameters");
  double g = static_cast<double>(n_clusters);
  return g / (g - 1.0) * (static_cast<double>(n_obs) - 1.0) / static_cast<double>(n_obs - n_params);
}

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

TwoWayCovariance two_way_covariance(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                    const DenseKey& a, const DenseKey& b, std::size_t n_params) {
  const auto n = static_cast<std::size_t>(X.rows());
  Frame pair(n);
  std::vector<double> va(a.ids.begin(), a.ids.end()), vb(b.ids.begin(), b.ids.end());
  pair.add("a", std::move(va));
  pair.add("b", std::move(vb));
  DenseKey ab = composite_key(pair, {"a", "b"});

  TwoWayCovariance out;
  out.first = sandwich(bread, cluster_meat(X, e, a.ids, a.n_levels)) * cr1_factor(a.n_levels, n, n_params);
  out.second = sandwich(bread, cluster_meat(X, e, b.ids, b.n_levels)) * cr1_factor(b.n_levels, n, n_params);
  out.intersection = ab.n_levels == n ? sandwich(bread, hc0_meat(X, e)) * cr1_factor(n, n, n_params)
                                      : sandwich(bread, cluster_meat(X, e, ab.ids, ab.n_levels)) *
                                            cr1_factor(ab.n_levels, n, n_params);
  out.raw = out.first + out.second - out.intersection;
  out.repaired = clip_psd(out.raw);
  return out;
}

RegressionResult ols(const RegressionSpec& spec, const Frame& data) {
  if (spec.endogenous) throw ConfigError("ols does not take an endogenous regressor; use tsls");
  Prepared p = prepare(spec, data);
  if (spec.regressors.empty()) throw ConfigError("ols needs at least one regressor");
  LsFit fit = ls_fit(p.exog, p.y, spec.regressors);

  RegressionResult r;
  r.names = spec.regressors;
  r.coefficients = fit.beta;
  r.n_obs = p.n;
  r.n_params = spec.regressors.size() + p.absorbed;
  Eigen::VectorXd e = p.y - p.exog * fit.beta;
  r.covariance = covariance(fit.bread, p.exog, e, p.clusters, r.n_params, r.dof_adjustment, r.n_clusters);
  finish(r);
  return r;
}

RegressionResult tsls(const RegressionSpec& spec, const Frame& data) {
  if (!spec.endogenous) throw ConfigError("tsls needs one endogenous regressor and one instrument");
  Prepared p = prepare(spec, data);
  const auto n = static_cast<Eigen::Index>(p.n);
  const auto k = static_cast<Eigen::Index>(spec.regressors.size() + 1);

  std::vector<std::string> names{*spec.endogenous};
  std::vector<std::string> z_names{*spec.instrument};
  for (const auto& r : spec.regressors) {
    names.push_back(r);
    z_names.push_back(r);
  }
  Eigen::MatrixXd X(n, k), Z(n, k);
  X.col(0) = p.endog;
  Z.col(0) = p.instrument;
  X.rightCols(k - 1) = p.exog;
  Z.rightCols(k - 1) = p.exog;

  RegressionResult r;
  r.names = names;
  r.n_obs = p.n;
  r.n_params = static_cast<std::size_t>(k) + p.absorbed;

  LsFit first = ls_fit(Z, p.endog, z_names);
  Eigen::VectorXd v = p.endog - Z * first.beta;
  std::string first_dof;
  std::vector<std::size_t> first_g;
  Eigen::MatrixXd first_cov = covariance(first.bread, Z, v, p.clusters, r.n_params, first_dof, first_g);
  double f = first.beta(0) * first.beta(0) / first_cov(0, 0);
  r.first_stage_f = f;
  r.weak_instrument = !(f >= kWeakInstrumentF);

  Eigen::MatrixXd Xhat = Z * (first.bread * (Z.transpose() * X));
  // The first column of Xhat is the first-stage fit; exogenous columns project onto themselves.
  Xhat.rightCols(k - 1) = p.exog;
  LsFit second = ls_fit(Xhat, p.y, names);
  r.coefficients = second.beta;
  Eigen::VectorXd e = p.y - X * second.beta;
  r.covariance = covariance(second.bread, Xhat, e, p.clusters, r.n_params, r.dof_adjustment, r.n_clusters);
  finish(r);
  return r;
}

EventStudyResult event_study(const Frame& panel, const std::unordered_map<std::int64_t, double>& exposure,
                             int reference_quarter) {
  const auto& hh = panel.col("household_id");
  const auto& dur = panel.col("duration_seconds");

  EventStudyResult res;
  std::vector<bool> keep(panel.rows(), true);
  std::vector<double> lny(panel.rows(), 0.0), lnexp(panel.rows(), 0.0);
  for (std::size_t i = 0; i < panel.rows(); ++i) {
    if (!(dur[i] > 0.0)) {
      keep[i] = false;
      ++res.dropped_zero_duration;
      continue;
    }
    auto it = exposure.find(static_cast<std::int64_t>(hh[i]));
    if (it == exposure.end() || !(it->second > 0.0)) {
      keep[i] = false;
      ++res.dropped_no_exposure;
      continue;
    }
    lny[i] = std::log(dur[i]);
    lnexp[i] = std::log(it->second);
  }
  Frame base = panel;
  base.add("ln_duration", std::move(lny));
  base.add("ln_exposure", std::move(lnexp));
  Frame data = base.filter(keep);
  res.n_obs = data.rows();

  std::set<int> quarters;
  for (double q : data.col("quarter")) quarters.insert(static_cast<int>(q));
  if (!quarters.count(reference_quarter))
    throw DataError("reference quarter " + std::to_string(reference_quarter) + " not present");

  RegressionSpec spec;
  spec.outcome = "ln_duration";
  spec.fixed_effects = {{"household_id"}, {"quarter", "cell"}};
  spec.clusters = {{"cell"}};
  std::vector<std::string> candidate;
  for (int q : quarters) {
    if (q == reference_quarter) continue;
    std::vector<double> col(data.rows());
    const auto& dq = data.col("quarter");
    const auto& le = data.col("ln_exposure");
    for (std::size_t i = 0; i < data.rows(); ++i) col[i] = static_cast<int>(dq[i]) == q ? le[i] : 0.0;
    std::string name = "q" + std::to_string(q);
    data.add(name, std::move(col));
    candidate.push_back(name);
  }

  // Quarters whose regressor has no variation once the effects are absorbed are reported missing.
  std::vector<std::string> cols = candidate;
  cols.push_back(spec.outcome);
  Frame absorbed = absorb(data, cols, spec.fixed_effects);
  std::set<std::string> missing;
  for (const auto& name : candidate) {
    double scale = 0.0, resid = 0.0;
    for (double v : data.col(name)) scale = std::max(scale, std::abs(v));
    for (double v : absorbed.col(name)) resid = std::max(resid, std::abs(v));
    if (scale == 0.0 || resid <= 1e-9 * scale) missing.insert(name);
    else spec.regressors.push_back(name);
  }

  RegressionResult fit;
  if (!spec.regressors.empty()) fit = ols(spec, data);
  for (int q : quarters) {
    EventStudyPoint pt;
    pt.quarter = q;
    if (q == reference_quarter) {
      pt.reference = true;
    } else {
      std::string name = "q" + std::to_string(q);
      if (missing.count(name)) {
        pt.missing = true;
        pt.coef = pt.se = std::nan("");
      } else {
        pt.coef = fit.coef(name);
        pt.se = fit.se(name);
      }
    }
    res.path.push_back(pt);
  }
  return res;
}

}  // namespace digitime::econ
