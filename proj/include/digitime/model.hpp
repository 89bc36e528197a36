#pragma once

// Household digital time-allocation model: isoelastic activity aggregator,
// closed-form time demands, the budget-constrained equilibrium, the adoption
// rule and the treatment effects of an efficiency shock.

#include <string>
#include <string_view>
#include <vector>

namespace digitime {

enum class Activity { leisure, productive, other };

std::string_view to_string(Activity a);
Activity parse_activity(std::string_view s);

/// Per-activity taste (theta), efficiency (xi) and curvature (eta).
struct ActivityParams {
  double theta = 1.0;
  double xi = 1.0;
  double eta = 1.0;

  /// Throws DomainError unless all three are strictly positive and finite.
  void validate() const;
  double quality() const { return theta * xi; }
};

struct ActivitySpec {
  Activity kind;
  ActivityParams params;
};

class Preferences {
 public:
  Preferences() = default;
  /// Requires at least two activities with unique kinds.
  explicit Preferences(std::vector<ActivitySpec> activities);

  static Preferences two(ActivityParams leisure, ActivityParams productive);
  static Preferences three(ActivityParams leisure, ActivityParams productive,
                           ActivityParams other);

  const std::vector<ActivitySpec>& activities() const { return activities_; }
  std::size_t size() const { return activities_.size(); }
  bool has(Activity a) const;
  std::size_t index_of(Activity a) const;
  const ActivityParams& params(Activity a) const { return activities_[index_of(a)].params; }
  ActivityParams& params(Activity a) { return activities_[index_of(a)].params; }

 private:
  std::vector<ActivitySpec> activities_;
};

struct Allocation {
  std::vector<Activity> activities;
  std::vector<double> hours;
  double total = 0.0;
  double shadow_price = 0.0;

  double at(Activity a) const;
};

struct TechShock {
  double delta_z = 0.0;
  double psi = 0.0;
  double cost_time = 0.0;

  void validate() const;
};

struct TreatmentEffects {
  std::vector<Activity> activities;
  std::vector<double> beta_gpt;
  bool exact = false;

  double at(Activity a) const;
};

/// |eta - 1| below this routes to the logarithmic branch.
inline constexpr double kLogBranchBand = 1e-9;

/// (theta*xi)^(eta-1) * omega^(-eta); 1/omega in the log-utility case.
double demand(const ActivityParams& p, double omega);

/// d demand / d omega.
double demand_derivative(const ActivityParams& p, double omega);

/// Activity utility in Box-Cox form ((theta*xi*h)^(1-1/eta) - 1) / (1 - 1/eta).
/// Differs from the power aggregator by the constant 1/(1-1/eta), so optima
/// and utility differences are unchanged; converges to ln(theta*xi*h) at eta = 1.
double activity_utility(const ActivityParams& p, double hours);

/// Marginal utility (theta*xi)^(1-1/eta) * h^(-1/eta).
double marginal_utility(const ActivityParams& p, double hours);

double total_utility(const Preferences& prefs, const std::vector<double>& hours);

struct SolveOptions {
  double omega_lo = 1e-9;
  double omega_hi = 1e9;
  double omega_min = 1e-15;
  double omega_max = 1e15;
  double rel_tol = 1e-12;
  int max_iter = 200;
};

/// Interior optimum of the aggregator subject to sum(hours) = total.
/// `tol` bounds the budget residual after the Newton polish step.
Allocation solve_allocation(const Preferences& prefs, double total, double tol = 1e-12,
                            const SolveOptions& opts = {});

/// Baseline preferences with the shock applied: xi_z *= 1 + delta_z and
/// xi_l *= 1 + psi * delta_z.
Preferences apply_shock(const Preferences& prefs, const TechShock& shock);

/// First-order envelope adoption gain delta * z^N * omega^N.
double adoption_gain(const Preferences& prefs, const Allocation& alloc_no, const TechShock& shock);

/// Exact utility difference v(adopt) - v(no adopt) at the same budget.
double exact_adoption_gain(const Preferences& prefs, double total, const TechShock& shock);

/// Time-cost adoption rule delta * z^N >= c_time.
bool should_adopt(const TechShock& shock, const Allocation& alloc_no);

TreatmentEffects exact_effects(const Preferences& prefs, double total, const TechShock& shock);

/// Closed-form first-order effects; two activities and psi = 0 only.
TreatmentEffects firstorder_effects(const Preferences& prefs, const Allocation& alloc_no,
                                    const TechShock& shock);

/// beta_z / eta_z - beta_l / eta_l.
double gap_identity_lhs(const TreatmentEffects& effects, const Preferences& prefs);

/// ((eta_z-1)/eta_z) ln(1+delta_z) - ((eta_l-1)/eta_l) ln(1+psi*delta_z).
double gap_identity_rhs(const Preferences& prefs, const TechShock& shock);

/// Share-weighted mean curvature sum_a s_a eta_a at an allocation.
double mean_curvature(const Preferences& prefs, const Allocation& alloc);

}  // namespace digitime
