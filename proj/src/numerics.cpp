#include "digitime/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "digitime/errors.hpp"
#include "digitime/kernels.hpp"

namespace digitime::numerics {

namespace {
constexpr double kInterior = 1e-9;
}

Bracket Bracket::make(const ScalarFn& f, double lo, double hi) {
  Bracket b{lo, hi, f(lo), f(hi)};
  b.validate();
  return b;
}

void Bracket::validate() const {
  if (!(lo < hi)) throw SolverError("bracket requires lo < hi", lo, hi, f_lo, f_hi);
  if (!(f_lo * f_hi <= 0.0)) throw SolverError("function does not change sign on bracket", lo, hi, f_lo, f_hi);
}

double brent_root(const ScalarFn& f, const Bracket& bracket, double tol, int max_iter,
                  std::vector<double>* trace) {
  bracket.validate();
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  double a = bracket.lo, b = bracket.hi, fa = bracket.f_lo, fb = bracket.f_hi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  double c = a, fc = fa, d = b - a, e = d;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
    double half = 0.5 * (c - b);
    if (std::abs(fb) <= tol || std::abs(half) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double s = fb / fa, p, q;
      if (a == c) {
        p = 2.0 * half * s;
        q = 1.0 - s;
      } else {
        double qq = fa / fc, r = fb / fc;
        p = s * (2.0 * half * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * half * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = half;
        e = d;
      }
    } else {
      d = half;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : (half > 0.0 ? tol1 : -tol1);
    b = std::clamp(b, bracket.lo, bracket.hi);
    if (trace) trace->push_back(b);
    fb = f(b);
  }
  std::ostringstream os;
  os << "brent_root did not converge in " << max_iter << " iterations";
  throw ConvergenceError(os.str(), b);
}

GridSpec GridSpec::defaults(int dims) {
  GridSpec s;
  s.points_per_dim = dims == 2 ? 200 : 60;
  return s;
}

void GridSpec::validate() const {
  if (points_per_dim < 3) throw DomainError("grid needs at least 3 points per dimension");
  if (refine_rounds < 0) throw DomainError("refine_rounds must be nonnegative");
  if (!(shrink_factor > 0.0 && shrink_factor < 1.0)) throw DomainError("shrink_factor must lie in (0, 1)");
}

namespace {

// Lexicographic grid over the free coordinates inside [lo_k, hi_k]; the last
// coordinate is total minus the others. Infeasible points are skipped.
std::vector<double> simplex_points(int dims, double total, const std::vector<double>& lo,
                                   const std::vector<double>& hi, int n) {
  std::vector<double> pts;
  auto coord = [&](int k, int i) {
    double l = std::max(lo[k], kInterior), h = std::min(hi[k], total - kInterior);
    return l + (h - l) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  if (dims == 2) {
    for (int i = 0; i < n; ++i) {
      double x = coord(0, i);
      double y = total - x;
      if (y < kInterior) continue;
      pts.insert(pts.end(), {x, y});
    }
  } else {
    for (int i = 0; i < n; ++i) {
      double x = coord(0, i);
      for (int j = 0; j < n; ++j) {
        double y = coord(1, j);
        double z = total - x - y;
        if (z < kInterior) continue;
        pts.insert(pts.end(), {x, y, z});
      }
    }
  }
  return pts;
}

}  // namespace

GridResult grid_maximize(const SimplexObjective& objective, int dims, double total,
                         const GridSpec& spec, bool parallel) {
  spec.validate();
  if (dims != 2 && dims != 3) throw DomainError("grid_maximize supports 2 or 3 dimensions");
  if (!(total > 3 * kInterior)) throw DomainError("simplex total too small");
  const auto d = static_cast<std::size_t>(dims);
  const int free = dims - 1;

  GridResult result;
  result.value = -std::numeric_limits<double>::infinity();
  std::vector<double> lo(free, 0.0), hi(free, total);
  double halfwidth = total;

  for (int round = 0; round <= spec.refine_rounds; ++round) {
    if (round > 0) {
      halfwidth *= spec.shrink_factor;
      for (int k = 0; k < free; ++k) {
        lo[k] = result.point[k] - halfwidth;
        hi[k] = result.point[k] + halfwidth;
      }
    }
    std::vector<double> pts = simplex_points(dims, total, lo, hi, spec.points_per_dim);
    std::vector<double> values(pts.size() / d);
    if (parallel)
      kernels::omp::evaluate_points(objective, pts, d, values);
    else
      kernels::serial::evaluate_points(objective, pts, d, values);
    if (!values.empty()) {
      std::size_t best = kernels::argmax(values);
      if (values[best] > result.value) {
        result.value = values[best];
        result.point.assign(pts.begin() + static_cast<std::ptrdiff_t>(best * d),
                            pts.begin() + static_cast<std::ptrdiff_t>((best + 1) * d));
      }
    }
    result.round_values.push_back(result.value);
  }
  return result;
}

std::vector<double> fd_elasticity(const std::function<std::vector<double>(double)>& h_fn,
                                  double total, double step) {
  if (!(total > 0.0)) throw DomainError("total must be positive");
  if (!(step > 0.0)) throw DomainError("step must be positive");
  std::vector<double> up = h_fn(total * std::exp(step));
  std::vector<double> down = h_fn(total * std::exp(-step));
  if (up.size() != down.size()) throw DomainError("h_fn returned inconsistent sizes");
  std::vector<double> out(up.size());
  for (std::size_t a = 0; a < up.size(); ++a) {
    if (!(up[a] > 0.0) || !(down[a] > 0.0)) throw DomainError("nonpositive hours at perturbed budget");
    out[a] = (std::log(up[a]) - std::log(down[a])) / (2.0 * step);
  }
  return out;
}

}  // namespace digitime::numerics
