#include <cmath>

#include "digitime/calibration.hpp"
#include "digitime/errors.hpp"
#include "digitime/model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace digitime;
using namespace digitime::calib;
using digitime::testing::Rng;

namespace {

// Plain bisection on the calibration equation in x = ln(1 + delta), written
// out with the naive log(1 + psi (e^x - 1)).
double oracle_gain(double beta_z, double beta_l, double r, double az, double eta_bar, double psi) {
  double ez = beta_z * eta_bar, el = beta_l * eta_bar;
  auto f = [&](double x) { return (1 - ez) * x - r * (1 - el) * std::log(1 + psi * (std::exp(x) - 1)) - az; };
  double lo = 0, hi = 60;
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 100 * (std::exp((1 - ez) * 0.5 * (lo + hi)) - 1);
}

}  // namespace

TEST_CASE("compute_az") {
  CalibrationInputs in;
  CHECK(compute_az(in) == doctest::Approx(1.0135312).epsilon(1e-12));
  in.bgpt_l = in.bgpt_z = 0.0;
  CHECK(compute_az(in) == 0.0);
  in.bgpt_l = 0.8;
  in.bgpt_z = in.ratio_r * 0.8;
  CHECK(compute_az(in) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  in.beta_l = -1.0;
  CHECK_THROWS_AS(compute_az(in), DomainError);
}

TEST_CASE("invert_psi0") {
  CHECK(std::abs(invert_psi0(1.01353) - 175.52) < 0.05);
  CHECK(invert_psi0(0.0) == 0.0);
  CHECK(invert_psi0(std::log(2.0)) == doctest::Approx(100.0).epsilon(1e-14));
}

TEST_CASE("invert_psi on published cells") {
  CalibrationInputs in;
  CHECK(std::abs(invert_psi(in, 0.90, 1.0).scaled_gain_pct - 66.45) < 0.05);
  CHECK(std::abs(invert_psi(in, 1.00, 1.0).scaled_gain_pct - 24.22) < 0.05);
  CHECK(std::abs(invert_psi(in, 0.73, 0.5).scaled_gain_pct - 174.12) < 0.05);
  auto cell = invert_psi(in, 0.9, 0.25);
  CHECK(std::abs(calibration_residual(in, 0.9, 0.25, cell.log1p_delta)) < 1e-12);
  CHECK(cell.eta_z == doctest::Approx(0.931 * 0.9));
  CHECK(cell.eta_l == doctest::Approx(1.374 * 0.9));
  CHECK(cell.delta_z == doctest::Approx(std::expm1(cell.log1p_delta)));
}

TEST_CASE("invert_psi matches a bisection oracle off the published grid") {
  CalibrationInputs in;
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    double eta_bar = rng.uniform(0.75, 1.05), psi = rng.uniform(0.05, 1.0);
    double got = invert_psi(in, eta_bar, psi).scaled_gain_pct;
    double want = oracle_gain(in.beta_z, in.beta_l, in.ratio_r, compute_az(in), eta_bar, psi);
    CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, want));
  }
}

TEST_CASE("invert_psi errors and notes") {
  CalibrationInputs in;
  try {
    invert_psi(in, 1.2, 0.5);
    FAIL("expected NoSolutionError");
  } catch (const NoSolutionError& e) {
    CHECK(e.bound.find("1/beta_z") != std::string::npos);
  }
  CHECK_THROWS_AS(invert_psi(in, 1.0, 1.5), DomainError);
  CHECK_THROWS_AS(invert_psi(in, 0.0, 0.5), DomainError);
  CalibrationInputs neg = in;
  neg.bgpt_l = 0.0;
  neg.bgpt_z = 0.2;
  CHECK_THROWS_AS(invert_psi(neg, 0.9, 0.5), NoSolutionError);
  auto low = invert_psi(in, 0.70, 0.5);
  CHECK(low.bound_note.has_value());
  CHECK_FALSE(invert_psi(in, 0.90, 0.5).bound_note.has_value());
}

TEST_CASE("published grid") {
  CalibrationInputs in;
  auto cells = grid(in, kTable8EtaBars, kTable8Psis);
  REQUIRE(cells.size() == 16);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    INFO("eta_bar ", cells[i].eta_bar, " psi ", cells[i].psi);
    CHECK(std::abs(cells[i].scaled_gain_pct - kTable8Golden[i]) <= 0.05);
  }
  CHECK(check_table8(cells).empty());
  // psi = 0 column is eta_bar-free
  for (std::size_t r = 1; r < 4; ++r) CHECK(std::abs(cells[r * 4].scaled_gain_pct - cells[0].scaled_gain_pct) < 1e-12);
  // eta_bar = 1.07, psi = 0 needs ln(1 + delta) far beyond a [0, 1e9] bracket on delta
  CHECK(cells[12].log1p_delta > 200.0);

  auto text = format_table(cells, kTable8EtaBars, kTable8Psis);
  CHECK(text.find("175.53") != std::string::npos);  // published 175.52 uses the unrounded ratio
  CHECK(text.find("85.16") != std::string::npos);
  CHECK(text.find("24.22") != std::string::npos);

  CHECK(grid(in, kTable8EtaBars, {}).empty());

  auto with_bad = grid(in, {0.9, 2.0}, {0.5});
  REQUIRE(with_bad.size() == 2);
  CHECK(with_bad[0].ok());
  CHECK_FALSE(with_bad[1].ok());
  CHECK(with_bad[1].error->find("bound") != std::string::npos);
  CHECK(format_table(with_bad, {0.9, 2.0}, {0.5}).find("n/a") != std::string::npos);
}

TEST_CASE("strict ratio moves cells by less than 0.01pp") {
  CalibrationInputs in;
  auto a = grid(in, kTable8EtaBars, kTable8Psis);
  auto b = grid(in.strict(), kTable8EtaBars, kTable8Psis);
  CHECK(in.strict().ratio_r == doctest::Approx(0.931 / 1.374));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].scaled_gain_pct - b[i].scaled_gain_pct) < 0.01);
}

TEST_CASE("gain is nonincreasing in psi and the equation is increasing in delta") {
  CalibrationInputs in;
  Rng rng(21);
  for (int i = 0; i < 100; ++i) {
    double eta_bar = rng.uniform(0.73, 1.07);
    double prev = invert_psi(in, eta_bar, 0.0).scaled_gain_pct;
    for (double psi = 0.1; psi <= 1.0 + 1e-12; psi += 0.1) {
      double g = invert_psi(in, eta_bar, psi).scaled_gain_pct;
      CHECK(g <= prev + 1e-9);
      prev = g;
    }
    double psi = rng.uniform(0.0, 1.0);
    double last = calibration_residual(in, eta_bar, psi, 0.0);
    for (double x = 0.05; x < 30.0; x += 0.05) {
      double f = calibration_residual(in, eta_bar, psi, x);
      CHECK(f > last);
      last = f;
    }
  }
}

TEST_CASE("round trip through the structural model") {
  Rng rng(314);
  for (int i = 0; i < 50; ++i) {
    double eta_z = rng.uniform(0.3, 0.98), eta_l = rng.uniform(1.02, 3.0), delta = rng.uniform(0.01, 2.0);
    auto prefs = Preferences::two({rng.log_uniform(0.2, 5.0), 1.0, eta_l}, {rng.log_uniform(0.2, 5.0), 1.0, eta_z});
    auto fx = exact_effects(prefs, 1.0, {delta, 0.0, 0.0});
    CalibrationInputs in;
    // Engel elasticities are eta_a / eta_bar; only their ratio matters here
    in.beta_z = eta_z;
    in.beta_l = eta_l;
    in.ratio_r = eta_z / eta_l;
    in.bgpt_l = fx.at(Activity::leisure);
    in.bgpt_z = fx.at(Activity::productive);
    double want = 100.0 * std::expm1((1.0 - eta_z) * std::log1p(delta));
    CHECK(std::abs(invert_psi0(compute_az(in)) - want) < 1e-8);
    auto cell = invert_psi(in, 1.0, 0.0);
    CHECK(std::abs(cell.log1p_delta - std::log1p(delta)) < 1e-8);
  }
}

TEST_CASE("eta bounds and implied etas") {
  auto [lo, hi] = eta_bounds(0.931, 1.374);
  CHECK(lo == doctest::Approx(0.7278).epsilon(1e-4));
  CHECK(hi == doctest::Approx(1.0741).epsilon(1e-4));
  CHECK_THROWS_AS(eta_bounds(1.0, 1.0), NoSolutionError);
  auto b = eta_bounds(0.5, 2.0);
  CHECK(b.first == 0.5);
  CHECK(b.second == 2.0);

  auto e = implied_etas({1.374, 0.931}, 0.9);
  CHECK(e[0] == doctest::Approx(1.2366));
  CHECK(e[1] == doctest::Approx(0.8379));
  CHECK(implied_etas({1.374, 0.931}, 1.0) == std::vector<double>{1.374, 0.931});
  CHECK(implied_etas({1, 1, 1}, 0.8) == std::vector<double>{0.8, 0.8, 0.8});
  CHECK_THROWS_AS(implied_etas({1.0}, 0.0), DomainError);
}
