#include <cmath>

#include "digitime/econometrics.hpp"
#include "digitime/errors.hpp"

namespace digitime::econ {

namespace {

void check_columns(const Frame& cells, const std::vector<std::string>& activities) {
  if (activities.empty()) throw ConfigError("no activity columns given");
  for (const char* c : {"cell_id", "quarter", "total", "log_precip"})
    if (!cells.has(c)) throw DataError(std::string("engel data is missing column '") + c + "'");
  for (const auto& a : activities)
    if (!cells.has(a)) throw DataError("engel data is missing activity column '" + a + "'");
  for (double h : cells.col("total"))
    if (!(h > 0.0) || !std::isfinite(h)) throw DataError("total hours must be positive");
}

RegressionSpec engel_spec(const std::string& outcome, bool use_iv, EngelClustering clustering) {
  RegressionSpec spec;
  spec.outcome = outcome;
  if (use_iv) {
    spec.endogenous = "ln_total";
    spec.instrument = "log_precip";
  } else {
    spec.regressors = {"ln_total"};
  }
  spec.fixed_effects = {{"cell_id"}, {"quarter"}};
  spec.clusters = {{"cell_id"}};
  if (clustering == EngelClustering::cell_and_quarter) spec.clusters.push_back({"quarter"});
  return spec;
}

RegressionResult run(const RegressionSpec& spec, const Frame& data) {
  return spec.endogenous ? tsls(spec, data) : ols(spec, data);
}

EngelEstimates init(const std::vector<std::string>& activities, bool use_iv) {
  EngelEstimates out;
  out.activities = activities;
  out.use_iv = use_iv;
  return out;
}

}  // namespace

std::size_t EngelEstimates::index_of(const std::string& activity) const {
  for (std::size_t i = 0; i < activities.size(); ++i)
    if (activities[i] == activity) return i;
  throw DataError("no Engel estimate for '" + activity + "'");
}

EngelEstimates engel_loglog(const Frame& cells, const std::vector<std::string>& activities, bool use_iv,
                            EngelClustering clustering) {
  check_columns(cells, activities);
  EngelEstimates out = init(activities, use_iv);
  const auto& total = cells.col("total");
  for (const auto& a : activities) {
    const auto& h = cells.col(a);
    std::vector<bool> keep(cells.rows());
    std::size_t dropped = 0;
    for (std::size_t i = 0; i < cells.rows(); ++i) {
      if (h[i] < 0.0 || !std::isfinite(h[i])) throw DataError("negative or non-finite hours in '" + a + "'");
      keep[i] = h[i] > 0.0;
      if (!keep[i]) ++dropped;
    }
    if (dropped == cells.rows()) throw DataError("activity column '" + a + "' is zero everywhere");
    Frame d = cells.filter(keep);
    std::vector<double> lnh(d.rows()), lnH(d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) {
      lnh[i] = std::log(d.col(a)[i]);
      lnH[i] = std::log(d.col("total")[i]);
    }
    d.add("ln_h", std::move(lnh));
    d.add("ln_total", std::move(lnH));
    auto r = run(engel_spec("ln_h", use_iv, clustering), d);

    double share = 0.0;
    for (std::size_t i = 0; i < cells.rows(); ++i) share += h[i] / total[i];
    share /= static_cast<double>(cells.rows());

    out.beta.push_back(r.coef("ln_total"));
    out.beta_se.push_back(r.se("ln_total"));
    out.gamma.push_back(std::nullopt);
    out.gamma_se.push_back(std::nullopt);
    out.mean_share.push_back(share);
    out.implied_beta_from_shares.push_back(std::nan(""));
    out.first_stage_f.push_back(r.first_stage_f);
    out.n_obs.push_back(r.n_obs);
    out.dropped.push_back(dropped);
  }
  return out;
}

EngelEstimates engel_shares(const Frame& cells, const std::vector<std::string>& activities, bool use_iv,
                            EngelClustering clustering) {
  check_columns(cells, activities);
  EngelEstimates out = init(activities, use_iv);
  const auto& total = cells.col("total");
  for (std::size_t i = 0; i < cells.rows(); ++i) {
    double sum = 0.0;
    for (const auto& a : activities) sum += cells.col(a)[i];
    if (std::abs(sum - total[i]) > 1e-6 * total[i])
      throw DataError("activity hours do not add up to total in row " + std::to_string(i + 1));
  }
  Frame d = cells;
  std::vector<double> lnH(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) lnH[i] = std::log(total[i]);
  d.add("ln_total", std::move(lnH));
  for (const auto& a : activities) {
    std::vector<double> s(d.rows());
    double mean = 0.0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      s[i] = cells.col(a)[i] / total[i];
      mean += s[i];
    }
    mean /= static_cast<double>(d.rows());
    d.add("share", std::move(s));
    auto r = run(engel_spec("share", use_iv, clustering), d);
    double g = r.coef("ln_total"), gse = r.se("ln_total");
    out.gamma.push_back(g);
    out.gamma_se.push_back(gse);
    out.mean_share.push_back(mean);
    // beta = 1 + gamma / s, with the mean share held fixed
    out.implied_beta_from_shares.push_back(1.0 + g / mean);
    out.beta.push_back(1.0 + g / mean);
    out.beta_se.push_back(gse / mean);
    out.first_stage_f.push_back(r.first_stage_f);
    out.n_obs.push_back(r.n_obs);
    out.dropped.push_back(0);
  }
  return out;
}

}  // namespace digitime::econ
