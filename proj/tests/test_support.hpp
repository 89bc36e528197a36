#pragma once

// Shared generators and independent oracles for the test suites. Nothing in
// here calls into the code paths it is used to check.

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "digitime/model.hpp"
#include "digitime/numerics.hpp"

namespace digitime::testing {

struct Rng {
  std::mt19937_64 engine;
  explicit Rng(std::uint64_t seed) : engine(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(engine); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
};

/// eta in [0.3, 3], theta*xi in [0.1, 10] (carried on theta), xi = 1.
inline Preferences random_preferences(Rng& rng, int n_activities) {
  auto draw = [&] { return ActivityParams{rng.log_uniform(0.1, 10.0), 1.0, rng.uniform(0.3, 3.0)}; };
  if (n_activities == 2) return Preferences::two(draw(), draw());
  return Preferences::three(draw(), draw(), draw());
}

/// Power-aggregator utility written out directly from its definition.
inline double oracle_utility(const Preferences& prefs, std::span<const double> hours) {
  double v = 0.0;
  for (std::size_t i = 0; i < hours.size(); ++i) {
    const auto& p = prefs.activities()[i].params;
    double x = p.theta * p.xi * hours[i];
    if (std::abs(p.eta - 1.0) < 1e-12)
      v += std::log(x);
    else {
      double a = 1.0 - 1.0 / p.eta;
      v += (std::pow(x, a) - 1.0) / a;
    }
  }
  return v;
}

inline numerics::GridResult grid_oracle(const Preferences& prefs, double total, int extra_rounds = 0) {
  auto spec = numerics::GridSpec::defaults(static_cast<int>(prefs.size()));
  spec.refine_rounds += extra_rounds;
  return numerics::grid_maximize([&](std::span<const double> h) { return oracle_utility(prefs, h); },
                                 static_cast<int>(prefs.size()), total, spec);
}

/// Single-activity FOC marginal utility = omega solved for h by plain bisection.
inline double bisect_foc_hours(const ActivityParams& p, double omega) {
  auto mu = [&](double h) { return std::pow(p.theta * p.xi, 1.0 - 1.0 / p.eta) * std::pow(h, -1.0 / p.eta); };
  double lo = 1e-12, hi = 1e12;
  for (int i = 0; i < 400; ++i) {
    double mid = std::sqrt(lo * hi);
    (mu(mid) > omega ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

}  // namespace digitime::testing
