#pragma once

// Inversion of Engel elasticities and causal browsing effects into the
// scaled productive efficiency gain, and the (eta_bar, psi) grid.

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace digitime::calib {

struct CalibrationInputs {
  double beta_z = 0.931;  // productive Engel elasticity
  double beta_l = 1.374;  // leisure Engel elasticity
  double bgpt_l = 1.512;  // causal log effect on leisure time
  double bgpt_z = 0.011;  // causal log effect on productive time
  double ratio_r = 0.6776;  // beta_z / beta_l as published (rounded)

  void validate() const;
  /// Same inputs with ratio_r recomputed as beta_z / beta_l.
  CalibrationInputs strict() const;
};

struct CalibrationCell {
  double eta_bar = 0.0;
  double psi = 0.0;
  double eta_z = 0.0;
  double eta_l = 0.0;
  double log1p_delta = 0.0;  // ln(1 + delta_z); delta itself overflows for eta_z near 1
  double delta_z = 0.0;
  double scaled_gain_pct = 0.0;
  std::optional<std::string> error;  // set when the cell has no solution
  std::optional<std::string> bound_note;  // eta_bar outside eta_bounds, solved anyway

  bool ok() const { return !error.has_value(); }
};

/// A_z = ratio_r * bgpt_l - bgpt_z.
double compute_az(const CalibrationInputs& in);

/// 100 * (exp(az) - 1).
double invert_psi0(double az);

/// ln(1 + psi * (e^x - 1)) without overflow for large x.
double log1p_psi_expm1(double psi, double x);

/// Residual of the calibration equation in x = ln(1 + delta_z).
double calibration_residual(const CalibrationInputs& in, double eta_bar, double psi, double x);

/// Solves for delta_z >= 0. Throws NoSolutionError naming the violated bound.
CalibrationCell invert_psi(const CalibrationInputs& in, double eta_bar, double psi);

/// Cross product ordered by (eta_bar, psi); failed cells carry their error.
std::vector<CalibrationCell> grid(const CalibrationInputs& in, const std::vector<double>& eta_bars,
                                  const std::vector<double>& psis);

/// (1/beta_l, 1/beta_z); throws NoSolutionError when lower >= upper.
std::pair<double, double> eta_bounds(double beta_z, double beta_l);

std::vector<double> implied_etas(const std::vector<double>& beta, double eta_bar);

// The published grid.
extern const std::vector<double> kTable8EtaBars;
extern const std::vector<double> kTable8Psis;
/// Row-major by eta_bar then psi.
extern const std::vector<double> kTable8Golden;
inline constexpr double kTable8Tolerance = 0.05;

struct GoldenMismatch {
  double eta_bar, psi, expected, got;
};

/// Cells of the published grid layout further than `tol` from the published values.
std::vector<GoldenMismatch> check_table8(const std::vector<CalibrationCell>& cells, double tol = kTable8Tolerance);

/// Aligned text table, eta_bar rows by psi columns, two decimals.
std::string format_table(const std::vector<CalibrationCell>& cells, const std::vector<double>& eta_bars,
                         const std::vector<double>& psis);

}  // namespace digitime::calib
