#pragma once

// Numerical primitives used both by the model and as independent oracles:
// Brent root finding, simplex grid search, finite-difference elasticities.

#include <functional>
#include <span>
#include <vector>

namespace digitime::numerics {

using ScalarFn = std::function<double(double)>;

struct Bracket {
  double lo = 0.0, hi = 0.0, f_lo = 0.0, f_hi = 0.0;

  /// Evaluates f at both ends; throws SolverError when there is no sign change.
  static Bracket make(const ScalarFn& f, double lo, double hi);
  void validate() const;
};

/// Brent's method. Stops when |f(x)| <= tol or the bracket is narrower than tol.
/// Iterates never leave [bracket.lo, bracket.hi]; `trace`, when given,
/// receives every evaluated abscissa.
double brent_root(const ScalarFn& f, const Bracket& bracket, double tol, int max_iter = 200,
                  std::vector<double>* trace = nullptr);

struct GridSpec {
  int points_per_dim = 200;
  int refine_rounds = 6;
  double shrink_factor = 0.2;

  /// 200 points for two activities, 60 for three.
  static GridSpec defaults(int dims);
  void validate() const;
};

struct GridResult {
  std::vector<double> point;
  double value = 0.0;
  std::vector<double> round_values;  // incumbent after the full grid and each refinement
};

using SimplexObjective = std::function<double(std::span<const double>)>;

/// Maximise `objective` over {x : x_i >= 1e-9, sum x = total} for dims in {2, 3}.
/// Exhaustive grid, then `refine_rounds` shrinking windows around the
/// incumbent. The objective must be safe to call concurrently.
GridResult grid_maximize(const SimplexObjective& objective, int dims, double total,
                         const GridSpec& spec, bool parallel = true);

/// Central difference of ln h_a with respect to ln H at log-step `step`.
std::vector<double> fd_elasticity(const std::function<std::vector<double>(double)>& h_fn,
                                  double total, double step);

}  // namespace digitime::numerics
