#pragma once

// Fixed-effects panel estimators: within transform, OLS and just-identified
// 2SLS with one- or two-way clustered covariance, the dynamic event study,
// Engel regressions, the GPT-window contrast and post-stratification weights.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "digitime/frame.hpp"
#include "digitime/records.hpp"

namespace digitime::econ {

using KeyColumns = std::vector<std::string>;

struct RegressionSpec {
  std::string outcome;
  std::vector<std::string> regressors;  // exogenous, besides absorbed effects
  std::optional<std::string> endogenous;
  std::optional<std::string> instrument;
  /// Each entry is one interacted categorical absorbed by the within
  /// transform. More than one entry is handled by alternating projections.
  std::vector<KeyColumns> fixed_effects;
  std::vector<KeyColumns> clusters;  // 0 (HC1), 1 or 2 composite keys
  std::optional<std::string> weights;

  void validate() const;
};

struct RegressionResult {
  std::vector<std::string> names;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_stats;
  std::size_t n_obs = 0;
  std::size_t n_params = 0;  // regressors plus absorbed levels, used in N - K
  std::vector<std::size_t> n_clusters;
  std::optional<double> first_stage_f;
  bool weak_instrument = false;
  std::string dof_adjustment;

  std::size_t index_of(const std::string& name) const;
  double coef(const std::string& name) const { return coefficients(index_of(name)); }
  double se(const std::string& name) const { return std_errors(index_of(name)); }
};

/// Subtract per-cell (weighted) means of `columns` inside the `fe_key` cells.
Frame within_transform(const Frame& data, const std::vector<std::string>& columns, const KeyColumns& fe_key,
                       const std::vector<double>& weights = {});

/// Alternating projections over several fixed-effect keys until the largest
/// change falls below `tol` (relative to column scale).
Frame absorb(const Frame& data, const std::vector<std::string>& columns, const std::vector<KeyColumns>& keys,
             const std::vector<double>& weights = {}, double tol = 1e-13, int max_iter = 10000);

RegressionResult ols(const RegressionSpec& spec, const Frame& data);

/// Just-identified 2SLS with one endogenous regressor and one excluded
/// instrument. first_stage_f is the clustered Wald statistic on the instrument.
RegressionResult tsls(const RegressionSpec& spec, const Frame& data);

// Covariance building blocks, exposed for verification.

/// sum_g s_g s_g' with s_g the cluster score sums.
Eigen::MatrixXd cluster_meat(const Eigen::MatrixXd& X, const Eigen::VectorXd& e, std::span<const std::int64_t> ids,
                             std::size_t n_groups);

/// White (HC0) meat sum_i e_i^2 x_i x_i'.
Eigen::MatrixXd hc0_meat(const Eigen::MatrixXd& X, const Eigen::VectorXd& e);

/// (G/(G-1)) * ((N-1)/(N-K)).
double cr1_factor(std::size_t n_clusters, std::size_t n_obs, std::size_t n_params);

struct TwoWayCovariance {
  Eigen::MatrixXd first, second, intersection;  // each already CR1-scaled
  Eigen::MatrixXd raw;                          // first + second - intersection
  Eigen::MatrixXd repaired;                     // eigenvalues clipped at 0
};

TwoWayCovariance two_way_covariance(const Eigen::MatrixXd& bread, const Eigen::MatrixXd& X, const Eigen::VectorXd& e,
                                    const DenseKey& a, const DenseKey& b, std::size_t n_params);

Eigen::MatrixXd clip_psd(const Eigen::MatrixXd& m);

// Event study ---------------------------------------------------------------

struct EventStudyPoint {
  int quarter = 0;
  double coef = 0.0;
  double se = 0.0;
  bool reference = false;
  bool missing = false;  // no identifying variation in this quarter
};

struct EventStudyResult {
  std::vector<EventStudyPoint> path;
  std::size_t n_obs = 0;
  std::size_t dropped_zero_duration = 0;
  std::size_t dropped_no_exposure = 0;
};

/// Reduced-form regression of ln(duration) on ln(exposure) x quarter dummies
/// with household and quarter x cell effects, clustered by cell. Frame
/// columns: household_id, quarter, cell, duration_seconds.
EventStudyResult event_study(const Frame& panel, const std::unordered_map<std::int64_t, double>& exposure,
                             int reference_quarter);

// Engel regressions ---------------------------------------------------------

struct EngelEstimates {
  std::vector<std::string> activities;
  std::vector<double> beta;
  std::vector<double> beta_se;
  std::vector<std::optional<double>> gamma;
  std::vector<std::optional<double>> gamma_se;
  std::vector<double> mean_share;
  std::vector<double> implied_beta_from_shares;
  std::vector<std::optional<double>> first_stage_f;
  std::vector<std::size_t> n_obs;
  std::vector<std::size_t> dropped;
  bool use_iv = false;

  std::size_t index_of(const std::string& activity) const;
};

/// Default is one-way by cell: with a dozen quarters the two-way estimator
/// over-rejects noticeably (see README).
enum class EngelClustering { cell, cell_and_quarter };

/// ln h_a = quarter FE + cell FE + beta_a ln H, per activity column. Frame
/// columns: cell_id, quarter, total, log_precip and one column per activity.
/// Rows with h_a = 0 are dropped.
EngelEstimates engel_loglog(const Frame& cells, const std::vector<std::string>& activities, bool use_iv,
                            EngelClustering clustering = EngelClustering::cell);

/// s_a = quarter FE + cell FE + gamma_a ln H with s_a = h_a / total; the
/// activity columns must add up to total (relative 1e-6).
EngelEstimates engel_shares(const Frame& cells, const std::vector<std::string>& activities, bool use_iv,
                            EngelClustering clustering = EngelClustering::cell);

// GPT-window contrast -------------------------------------------------------

struct WindowContrast {
  std::array<double, 4> gpt_share{};
  std::array<double, 4> control_share{};
  std::array<double, 4> difference{};
  std::size_t cells_used = 0;
  std::size_t cells_dropped = 0;  // cells with GPT windows but no never-user interval
  std::size_t gpt_windows = 0;
  std::size_t control_intervals = 0;
};

/// Duration-weighted category shares inside GPT windows versus never-user
/// intervals matched on day of week, half-hour slot, income and age bin.
/// Control shares are averaged over cells with weights equal to the GPT
/// duration in each cell.
WindowContrast window_contrast(std::span<const IntervalRecord> intervals);

// Post-stratification -------------------------------------------------------

using DemoCell = std::pair<int, int>;  // (income_bin, age_bin)

/// weight(cell) = target_share / sample_share.
std::map<DemoCell, double> raking_weights(const std::map<DemoCell, long>& sample_counts,
                                          const std::map<DemoCell, double>& target_shares);

}  // namespace digitime::econ

namespace digitime::econ {

// Long-difference IV ------------------------------------------------------

struct HouseholdInputs {
  double exposure = 0.0;
  double coverage = 0.0;
  bool ever_used = false;
};

struct LongDifferenceEstimate {
  Category category = Category::productive;
  RegressionResult iv;
  RegressionResult ols;
};

struct LongDifferenceResult {
  std::vector<LongDifferenceEstimate> by_category;  // in kCategories order
  std::size_t households = 0;
  std::size_t dropped_zero_exposure = 0;
  std::size_t dropped_missing_window = 0;  // household-category pairs with no positive duration in a window
  std::vector<int> pre_quarters, post_quarters;

  const LongDifferenceEstimate& at(Category c) const { return by_category[index(c)]; }
};

/// Change in mean log duration between the last four quarters and the
/// quarters up to the release (or, with `placebo`, between the last two
/// pre-period quarters and the earlier ones), regressed on ever-use
/// instrumented by ln exposure, with a coverage control and income x age x
/// region effects, clustered by that cell.
LongDifferenceResult long_difference(std::span<const PanelRecord> panel,
                                     const std::map<std::int64_t, HouseholdInputs>& households, bool placebo);

/// Panel frame for event_study with a cell column built from income x age x region.
Frame event_study_frame(std::span<const PanelRecord> panel, Category category);

}  // namespace digitime::econ
