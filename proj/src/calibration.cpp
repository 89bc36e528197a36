#include "digitime/calibration.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "digitime/errors.hpp"
#include "digitime/numerics.hpp"

namespace digitime::calib {

namespace {

constexpr double kMaxLogDelta = 1e4;  // probe ceiling for ln(1 + delta_z)
constexpr double kResidualTol = 1e-12;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

const std::vector<double> kTable8EtaBars{0.73, 0.90, 1.00, 1.07};
const std::vector<double> kTable8Psis{0.0, 0.25, 0.5, 1.0};
const std::vector<double> kTable8Golden{
    175.52, 174.46, 174.12, 173.76,  //
    175.52, 85.16,  75.59,  66.45,   //
    175.52, 33.60,  28.80,  24.22,   //
    175.52, 1.73,   1.47,   1.21,
};

void CalibrationInputs::validate() const {
  for (double v : {beta_z, beta_l, bgpt_l, bgpt_z, ratio_r})
    if (!std::isfinite(v)) throw DomainError("calibration inputs must be finite");
  if (!(beta_z > 0.0) || !(beta_l > 0.0)) throw DomainError("Engel elasticities must be positive");
  if (!(ratio_r > 0.0)) throw DomainError("ratio_r must be positive");
}

CalibrationInputs CalibrationInputs::strict() const {
  CalibrationInputs out = *this;
  out.ratio_r = beta_z / beta_l;
  return out;
}

double compute_az(const CalibrationInputs& in) {
  in.validate();
  return in.ratio_r * in.bgpt_l - in.bgpt_z;
}

double invert_psi0(double az) { return 100.0 * std::expm1(az); }

double log1p_psi_expm1(double psi, double x) {
  if (psi == 0.0) return 0.0;
  if (x > 1.0) return x + std::log(psi + (1.0 - psi) * std::exp(-x));
  return std::log1p(psi * std::expm1(x));
}

double calibration_residual(const CalibrationInputs& in, double eta_bar, double psi, double x) {
  double eta_z = in.beta_z * eta_bar, eta_l = in.beta_l * eta_bar;
  return (1.0 - eta_z) * x - in.ratio_r * (1.0 - eta_l) * log1p_psi_expm1(psi, x) - compute_az(in);
}

CalibrationCell invert_psi(const CalibrationInputs& in, double eta_bar, double psi) {
  in.validate();
  if (!(eta_bar > 0.0) || !std::isfinite(eta_bar)) throw DomainError("eta_bar must be positive");
  if (!(psi >= 0.0 && psi <= 1.0)) throw DomainError("psi must lie in [0, 1]");

  CalibrationCell cell;
  cell.eta_bar = eta_bar;
  cell.psi = psi;
  cell.eta_z = in.beta_z * eta_bar;
  cell.eta_l = in.beta_l * eta_bar;
  const double az = compute_az(in);
  if (cell.eta_z >= 1.0)
    throw NoSolutionError("eta_z = " + fmt(cell.eta_z) + " >= 1: productive time must be a necessity",
                          "eta_bar < 1/beta_z = " + fmt(1.0 / in.beta_z));
  if (az < 0.0) throw NoSolutionError("A_z = " + fmt(az) + " < 0 implies a negative delta_z", "A_z >= 0");
  if (cell.eta_l <= 1.0) cell.bound_note = "eta_bar <= 1/beta_l = " + fmt(1.0 / in.beta_l) + ": leisure not a luxury";

  double x = 0.0;
  if (az == 0.0) {
    x = 0.0;
  } else if (psi == 0.0) {
    x = az / (1.0 - cell.eta_z);
  } else {
    auto f = [&](double v) { return calibration_residual(in, eta_bar, psi, v); };
    double hi = 1.0;
    while (f(hi) < 0.0) {
      hi *= 2.0;
      if (hi > kMaxLogDelta)
        throw NoSolutionError("no sign change for ln(1+delta_z) up to " + fmt(kMaxLogDelta),
                              "eta_l > 1 or eta_z < 1 with finite delta_z");
    }
    auto bracket = numerics::Bracket::make(f, 0.0, hi);
    x = numerics::brent_root(f, bracket, 1e-15 * std::max(1.0, hi));
    if (std::abs(f(x)) > kResidualTol * std::max(1.0, az))
      throw ConvergenceError("calibration residual above tolerance", x);
  }
  cell.log1p_delta = x;
  cell.delta_z = std::expm1(x);
  cell.scaled_gain_pct = 100.0 * std::expm1((1.0 - cell.eta_z) * x);
  return cell;
}

std::vector<CalibrationCell> grid(const CalibrationInputs& in, const std::vector<double>& eta_bars,
                                  const std::vector<double>& psis) {
  std::vector<CalibrationCell> out;
  for (double e : eta_bars)
    for (double p : psis) {
      try {
        out.push_back(invert_psi(in, e, p));
      } catch (const NoSolutionError& err) {
        CalibrationCell c;
        c.eta_bar = e;
        c.psi = p;
        c.eta_z = in.beta_z * e;
        c.eta_l = in.beta_l * e;
        c.log1p_delta = c.delta_z = c.scaled_gain_pct = std::nan("");
        c.error = std::string(err.what()) + " [bound: " + err.bound + "]";
        out.push_back(c);
      } catch (const Error& err) {
        CalibrationCell c;
        c.eta_bar = e;
        c.psi = p;
        c.log1p_delta = c.delta_z = c.scaled_gain_pct = std::nan("");
        c.error = err.what();
        out.push_back(c);
      }
    }
  return out;
}

std::pair<double, double> eta_bounds(double beta_z, double beta_l) {
  if (!(beta_z > 0.0) || !(beta_l > 0.0)) throw DomainError("Engel elasticities must be positive");
  double lower = 1.0 / beta_l, upper = 1.0 / beta_z;
  if (lower >= upper)
    throw NoSolutionError("no eta_bar makes leisure a luxury and productive time a necessity: [" + fmt(lower) +
                              ", " + fmt(upper) + "]",
                          "1/beta_l < 1/beta_z");
  return {lower, upper};
}

std::vector<double> implied_etas(const std::vector<double>& beta, double eta_bar) {
  if (!(eta_bar > 0.0)) throw DomainError("eta_bar must be positive");
  std::vector<double> out;
  for (double b : beta) out.push_back(b * eta_bar);
  return out;
}

std::vector<GoldenMismatch> check_table8(const std::vector<CalibrationCell>& cells, double tol) {
  std::vector<GoldenMismatch> bad;
  if (cells.size() != kTable8Golden.size()) {
    bad.push_back({std::nan(""), std::nan(""), static_cast<double>(kTable8Golden.size()),
                   static_cast<double>(cells.size())});
    return bad;
  }
  for (std::size_t i = 0; i < cells.size(); ++i) {
    double got = cells[i].scaled_gain_pct;
    if (!cells[i].ok() || !(std::abs(got - kTable8Golden[i]) <= tol))
      bad.push_back({cells[i].eta_bar, cells[i].psi, kTable8Golden[i], got});
  }
  return bad;
}

std::string format_table(const std::vector<CalibrationCell>& cells, const std::vector<double>& eta_bars,
                         const std::vector<double>& psis) {
  std::ostringstream os;
  char buf[64];
  os << "Scaled productive efficiency gain (%)\n";
  std::snprintf(buf, sizeof buf, "%-14s", "eta_bar \\ psi");
  os << buf;
  for (double p : psis) {
    std::snprintf(buf, sizeof buf, "%10.2f", p);
    os << buf;
  }
  os << '\n';
  std::size_t k = 0;
  for (double e : eta_bars) {
    std::snprintf(buf, sizeof buf, "%-14.2f", e);
    os << buf;
    for (std::size_t j = 0; j < psis.size(); ++j, ++k) {
      if (k < cells.size() && cells[k].ok())
        std::snprintf(buf, sizeof buf, "%10.2f", cells[k].scaled_gain_pct);
      else
        std::snprintf(buf, sizeof buf, "%10s", "n/a");
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace digitime::calib
