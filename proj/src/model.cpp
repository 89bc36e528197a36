#include "digitime/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "digitime/errors.hpp"

namespace digitime {

namespace {

bool log_branch(double eta) { return std::abs(eta - 1.0) < kLogBranchBand; }

double budget_gap(const Preferences& prefs, double omega, double total) {
  double sum = 0.0;
  for (const auto& a : prefs.activities()) sum += demand(a.params, omega);
  return sum - total;
}

}  // namespace

std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::leisure:
      return "leisure";
    case Activity::productive:
      return "productive";
    case Activity::other:
      return "other";
  }
  return "?";
}

Activity parse_activity(std::string_view s) {
  if (s == "leisure") return Activity::leisure;
  if (s == "productive") return Activity::productive;
  if (s == "other" || s == "mixed") return Activity::other;
  throw DataError("unknown activity '" + std::string(s) + "'");
}

void ActivityParams::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(theta) || !ok(xi) || !ok(eta)) {
    std::ostringstream os;
    os << "activity parameters must be positive (theta=" << theta << ", xi=" << xi
       << ", eta=" << eta << ")";
    throw DomainError(os.str());
  }
}

Preferences::Preferences(std::vector<ActivitySpec> activities) : activities_(std::move(activities)) {
  if (activities_.size() < 2) throw DomainError("preferences need at least two activities");
  for (std::size_t i = 0; i < activities_.size(); ++i) {
    activities_[i].params.validate();
    for (std::size_t j = 0; j < i; ++j)
      if (activities_[j].kind == activities_[i].kind)
        throw DomainError("duplicate activity '" + std::string(to_string(activities_[i].kind)) + "'");
  }
}

Preferences Preferences::two(ActivityParams leisure, ActivityParams productive) {
  return Preferences({{Activity::leisure, leisure}, {Activity::productive, productive}});
}

Preferences Preferences::three(ActivityParams leisure, ActivityParams productive,
                               ActivityParams other) {
  return Preferences(
      {{Activity::leisure, leisure}, {Activity::productive, productive}, {Activity::other, other}});
}

bool Preferences::has(Activity a) const {
  return std::any_of(activities_.begin(), activities_.end(),
                     [a](const ActivitySpec& s) { return s.kind == a; });
}

std::size_t Preferences::index_of(Activity a) const {
  for (std::size_t i = 0; i < activities_.size(); ++i)
    if (activities_[i].kind == a) return i;
  throw DomainError("preferences have no '" + std::string(to_string(a)) + "' activity");
}

double Allocation::at(Activity a) const {
  for (std::size_t i = 0; i < activities.size(); ++i)
    if (activities[i] == a) return hours[i];
  throw DomainError("allocation has no '" + std::string(to_string(a)) + "' activity");
}

void TechShock::validate() const {
  if (!(delta_z >= 0.0) || !std::isfinite(delta_z)) throw DomainError("delta_z must be >= 0");
  if (!(psi >= 0.0 && psi <= 1.0)) throw DomainError("psi must lie in [0, 1]");
  if (!(cost_time >= 0.0)) throw DomainError("cost_time must be >= 0");
}

double TreatmentEffects::at(Activity a) const {
  for (std::size_t i = 0; i < activities.size(); ++i)
    if (activities[i] == a) return beta_gpt[i];
  throw DomainError("effects have no '" + std::string(to_string(a)) + "' activity");
}

double demand(const ActivityParams& p, double omega) {
  if (!(omega > 0.0)) throw DomainError("shadow price must be positive");
  p.validate();
  if (log_branch(p.eta)) return 1.0 / omega;
  return std::exp((p.eta - 1.0) * std::log(p.quality()) - p.eta * std::log(omega));
}

double demand_derivative(const ActivityParams& p, double omega) {
  double eta = log_branch(p.eta) ? 1.0 : p.eta;
  return -eta * demand(p, omega) / omega;
}

double activity_utility(const ActivityParams& p, double hours) {
  if (!(hours > 0.0)) throw DomainError("activity hours must be positive");
  double log_x = std::log(p.quality()) + std::log(hours);
  if (log_branch(p.eta)) return log_x;
  double alpha = 1.0 - 1.0 / p.eta;
  return std::expm1(alpha * log_x) / alpha;
}

double marginal_utility(const ActivityParams& p, double hours) {
  if (!(hours > 0.0)) throw DomainError("activity hours must be positive");
  if (log_branch(p.eta)) return 1.0 / hours;
  double alpha = 1.0 - 1.0 / p.eta;
  return std::exp(alpha * std::log(p.quality()) - std::log(hours) / p.eta);
}

double total_utility(const Preferences& prefs, const std::vector<double>& hours) {
  if (hours.size() != prefs.size()) throw DomainError("hours/activities size mismatch");
  double v = 0.0;
  for (std::size_t i = 0; i < hours.size(); ++i)
    v += activity_utility(prefs.activities()[i].params, hours[i]);
  return v;
}

Allocation solve_allocation(const Preferences& prefs, double total, double tol,
                            const SolveOptions& opts) {
  if (!(total > 0.0) || !std::isfinite(total)) throw DomainError("time budget must be positive");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  for (const auto& a : prefs.activities()) a.params.validate();

  // g is strictly decreasing in omega; widen geometrically until it changes sign.
  double lo = opts.omega_lo, hi = opts.omega_hi;
  double g_lo = budget_gap(prefs, lo, total);
  double g_hi = budget_gap(prefs, hi, total);
  while (g_lo < 0.0 && lo > opts.omega_min) {
    lo = std::max(lo * 0.1, opts.omega_min);
    g_lo = budget_gap(prefs, lo, total);
  }
  while (g_hi > 0.0 && hi < opts.omega_max) {
    hi = std::min(hi * 10.0, opts.omega_max);
    g_hi = budget_gap(prefs, hi, total);
  }
  if (g_lo < 0.0 || g_hi > 0.0)
    throw SolverError("shadow price not bracketed", lo, hi, g_lo, g_hi);

  // Bisection in log(omega) so the relative tolerance is uniform across scales.
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int it = 0; it < opts.max_iter && (log_hi - log_lo) > opts.rel_tol; ++it) {
    double mid = 0.5 * (log_lo + log_hi);
    double g = budget_gap(prefs, std::exp(mid), total);
    if (g == 0.0) {
      log_lo = log_hi = mid;
      break;
    }
    (g > 0.0 ? log_lo : log_hi) = mid;
  }
  double omega = std::exp(0.5 * (log_lo + log_hi));

  double slope = 0.0;
  for (const auto& a : prefs.activities()) slope += demand_derivative(a.params, omega);
  double g = budget_gap(prefs, omega, total);
  double polished = omega - g / slope;
  if (polished > 0.0 && std::abs(budget_gap(prefs, polished, total)) <= std::abs(g)) omega = polished;

  Allocation alloc;
  alloc.total = total;
  alloc.shadow_price = omega;
  for (const auto& a : prefs.activities()) {
    alloc.activities.push_back(a.kind);
    alloc.hours.push_back(demand(a.params, omega));
  }
  double residual = std::abs(budget_gap(prefs, omega, total));
  if (residual > tol * std::max(1.0, total)) {
    std::ostringstream os;
    os << "budget residual " << residual << " exceeds tolerance " << tol;
    throw ConvergenceError(os.str(), omega);
  }
  return alloc;
}

Preferences apply_shock(const Preferences& prefs, const TechShock& shock) {
  shock.validate();
  Preferences out = prefs;
  out.params(Activity::productive).xi *= 1.0 + shock.delta_z;
  if (out.has(Activity::leisure)) out.params(Activity::leisure).xi *= 1.0 + shock.psi * shock.delta_z;
  return out;
}

double adoption_gain(const Preferences& prefs, const Allocation& alloc_no, const TechShock& shock) {
  (void)prefs;
  shock.validate();
  return shock.delta_z * alloc_no.at(Activity::productive) * alloc_no.shadow_price;
}

double exact_adoption_gain(const Preferences& prefs, double total, const TechShock& shock) {
  Preferences adopted = apply_shock(prefs, shock);
  Allocation no = solve_allocation(prefs, total);
  Allocation yes = solve_allocation(adopted, total);
  return total_utility(adopted, yes.hours) - total_utility(prefs, no.hours);
}

bool should_adopt(const TechShock& shock, const Allocation& alloc_no) {
  return shock.delta_z * alloc_no.at(Activity::productive) >= shock.cost_time;
}

TreatmentEffects exact_effects(const Preferences& prefs, double total, const TechShock& shock) {
  Allocation no = solve_allocation(prefs, total);
  Allocation yes = solve_allocation(apply_shock(prefs, shock), total);
  TreatmentEffects fx;
  fx.exact = true;
  fx.activities = no.activities;
  for (std::size_t i = 0; i < no.hours.size(); ++i)
    fx.beta_gpt.push_back(std::log(yes.hours[i]) - std::log(no.hours[i]));
  return fx;
}

TreatmentEffects firstorder_effects(const Preferences& prefs, const Allocation& alloc_no,
                                    const TechShock& shock) {
  shock.validate();
  if (prefs.size() != 2 || !prefs.has(Activity::leisure) || !prefs.has(Activity::productive))
    throw UnsupportedError("first-order effects need exactly the leisure and productive activities");
  if (shock.psi != 0.0) throw UnsupportedError("first-order effects assume psi = 0");

  double eta_z = prefs.params(Activity::productive).eta;
  double eta_l = prefs.params(Activity::leisure).eta;
  double z = alloc_no.at(Activity::productive);
  double l = alloc_no.at(Activity::leisure);
  double shift = std::log1p(shock.delta_z);

  double beta_z = (eta_z - 1.0) / (1.0 + (eta_z / eta_l) * (z / l)) * shift;
  double beta_l = (1.0 - eta_z) * (eta_l / eta_z) / (1.0 + (eta_l / eta_z) * (l / z)) * shift;

  TreatmentEffects fx;
  fx.exact = false;
  for (const auto& a : prefs.activities()) {
    fx.activities.push_back(a.kind);
    fx.beta_gpt.push_back(a.kind == Activity::productive ? beta_z : beta_l);
  }
  return fx;
}

double gap_identity_lhs(const TreatmentEffects& effects, const Preferences& prefs) {
  return effects.at(Activity::productive) / prefs.params(Activity::productive).eta -
         effects.at(Activity::leisure) / prefs.params(Activity::leisure).eta;
}

double gap_identity_rhs(const Preferences& prefs, const TechShock& shock) {
  double eta_z = prefs.params(Activity::productive).eta;
  double eta_l = prefs.params(Activity::leisure).eta;
  return (eta_z - 1.0) / eta_z * std::log1p(shock.delta_z) -
         (eta_l - 1.0) / eta_l * std::log1p(shock.psi * shock.delta_z);
}

double mean_curvature(const Preferences& prefs, const Allocation& alloc) {
  double sum_h = 0.0, weighted = 0.0;
  for (std::size_t i = 0; i < alloc.hours.size(); ++i) {
    sum_h += alloc.hours[i];
    weighted += alloc.hours[i] * prefs.activities()[i].params.eta;
  }
  return weighted / sum_h;
}

}  // namespace digitime
