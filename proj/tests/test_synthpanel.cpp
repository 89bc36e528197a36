#include <cmath>

#include "digitime/econometrics.hpp"
#include "digitime/errors.hpp"
#include "digitime/synthpanel.hpp"
#include "doctest.h"

using namespace digitime;
using namespace digitime::synth;

namespace {

std::map<std::int64_t, econ::HouseholdInputs> inputs(const LongDifferenceData& d) {
  std::map<std::int64_t, econ::HouseholdInputs> m;
  for (const auto& h : d.households) m[h.household_id] = {h.exposure, h.coverage, h.adopted};
  return m;
}

Frame engel_frame(const EngelData& d) {
  std::vector<double> cell, q, total, precip;
  std::array<std::vector<double>, 3> h;
  for (const auto& c : d.cells) {
    cell.push_back(c.cell_id);
    q.push_back(c.quarter);
    total.push_back(c.total);
    precip.push_back(c.log_precip);
    for (std::size_t a = 0; a < 3; ++a) h[a].push_back(c.hours[a]);
  }
  Frame f(cell.size());
  f.add("cell_id", cell);
  f.add("quarter", q);
  f.add("total", total);
  f.add("log_precip", precip);
  for (std::size_t a = 0; a < 3; ++a) f.add(kEngelActivities[a], h[a]);
  return f;
}

const std::vector<std::string> kActs{"leisure", "productive", "other"};

}  // namespace

TEST_CASE("config validation and keys") {
  DgpConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.first_quarter() == -4);
  CHECK(c.last_quarter() == 7);
  auto bad = c;
  bad.exposure_log_sd = 0.0;
  CHECK_THROWS_AS(generate_long_difference(bad), ConfigError);
  bad = c;
  bad.n_quarters = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.noise_sd_duration = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.window_gap_leisure = -0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  c.set("true_effects.leisure", "0.25");
  c.set("seed", "99");
  c.set("n_households", "500");
  CHECK(c.true_effects[index(Category::leisure)] == 0.25);
  CHECK(c.seed == 99);
  CHECK(c.n_households == 500);
  CHECK_THROWS_AS(c.set("no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(c.set("n_households", "1.5"), ConfigError);
  CHECK_THROWS_AS(c.set("rain_elasticity", "abc"), ConfigError);

  DgpConfig round;
  for (const auto& [k, v] : c.entries()) round.set(k, v);
  CHECK(round.entries() == c.entries());
}

TEST_CASE("long-difference generator") {
  DgpConfig c;
  c.n_households = 2000;
  auto a = generate_long_difference(c);
  SUBCASE("shape and determinism") {
    CHECK(a.records.size() == 2000u * 12u * 4u);
    auto b = generate_long_difference(c);
    REQUIRE(a.records.size() == b.records.size());
    bool same = true;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      const auto &x = a.records[i], &y = b.records[i];
      same = same && x.household_id == y.household_id && x.quarter == y.quarter && x.category == y.category &&
             x.income_bin == y.income_bin && x.duration_seconds == y.duration_seconds;
    }
    CHECK(same);
    c.seed += 1;
    auto other = generate_long_difference(c);
    CHECK(other.records[5].duration_seconds != a.records[5].duration_seconds);
  }
  SUBCASE("noise-free outcomes carry exactly the true effects") {
    std::size_t treated = 0;
    for (std::size_t i = 0; i < a.records.size(); ++i) {
      const auto& r = a.records[i];
      const auto& h = a.households[static_cast<std::size_t>(r.household_id - 1)];
      double diff = a.log_noise_free[i] - a.log_counterfactual[i];
      if (h.adopted && r.quarter >= h.first_use_quarter) {
        ++treated;
        CHECK(std::abs(diff - c.true_effects[index(r.category)]) < 1e-12);
      } else {
        CHECK(diff == 0.0);
      }
      CHECK(r.duration_seconds > 0.0);
    }
    CHECK(treated > 0);
  }
  SUBCASE("adoption is absorbing and starts in the post period") {
    for (const auto& h : a.households) {
      if (h.adopted) {
        CHECK(h.first_use_quarter >= 1);
        CHECK(h.first_use_quarter <= c.last_quarter() - 3);
      } else {
        CHECK(h.first_use_quarter == 0);
      }
      CHECK(h.exposure > 0.0);
      CHECK(h.exposure <= 1.0);
    }
  }
}

TEST_CASE("exposure is independent of the confound") {
  DgpConfig c;
  auto d = generate_long_difference(c);
  double mx = 0, my = 0;
  const double n = static_cast<double>(d.households.size());
  for (const auto& h : d.households) {
    mx += std::log(h.exposure);
    my += h.confound;
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (const auto& h : d.households) {
    double x = std::log(h.exposure) - mx, y = h.confound - my;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.02);
}

TEST_CASE("long-difference estimators on the synthetic panel") {
  DgpConfig c;
  SUBCASE("confounding: IV recovers, OLS does not") {
    auto d = generate_long_difference(c);
    auto r = econ::long_difference(d.records, inputs(d), false);
    const auto& l = r.at(Category::leisure);
    MESSAGE("iv ", l.iv.coef("gpt_use"), " se ", l.iv.se("gpt_use"), " F ", *l.iv.first_stage_f, " ols ",
            l.ols.coef("gpt_use"), " se ", l.ols.se("gpt_use"));
    CHECK(std::abs(l.iv.coef("gpt_use") - 1.512) < 2.0 * l.iv.se("gpt_use"));
    CHECK(std::abs(l.ols.coef("gpt_use") - 1.512) >= 3.0 * l.ols.se("gpt_use"));
    CHECK(*l.iv.first_stage_f > 30.0);
    for (auto cat : {Category::productive, Category::mixed, Category::adcdn}) {
      const auto& e = r.at(cat);
      CHECK(std::abs(e.iv.coef("gpt_use") - c.true_effects[index(cat)]) < 2.0 * e.iv.se("gpt_use"));
    }
  }
  SUBCASE("no confounding: both estimators recover") {
    c.confound_strength = 0.0;
    auto d = generate_long_difference(c);
    auto r = econ::long_difference(d.records, inputs(d), false);
    const auto& l = r.at(Category::leisure);
    CHECK(std::abs(l.iv.coef("gpt_use") - 1.512) < 2.0 * l.iv.se("gpt_use"));
    CHECK(std::abs(l.ols.coef("gpt_use") - 1.512) < 2.0 * l.ols.se("gpt_use"));
  }
  SUBCASE("zero effects and the pre-period placebo") {
    c.true_effects = {0, 0, 0, 0};
    auto d = generate_long_difference(c);
    auto r = econ::long_difference(d.records, inputs(d), false);
    for (const auto& e : r.by_category) CHECK(std::abs(e.iv.coef("gpt_use")) < 2.0 * e.iv.se("gpt_use"));
    auto p = econ::long_difference(d.records, inputs(d), true);
    CHECK(p.post_quarters == std::vector<int>{-1, 0});
    for (const auto& e : p.by_category) CHECK(std::abs(e.iv.coef("gpt_use")) < 2.0 * e.iv.se("gpt_use"));
  }
}

TEST_CASE("event study on the synthetic panel") {
  DgpConfig c;
  c.n_households = 3000;
  SUBCASE("no treatment: flat") {
    c.true_effects = {0, 0, 0, 0};
    auto d = generate_long_difference(c);
    std::unordered_map<std::int64_t, double> e;
    for (const auto& h : d.households) e[h.household_id] = h.exposure;
    auto es = econ::event_study(econ::event_study_frame(d.records, Category::leisure), e, 0);
    int outside = 0;
    for (const auto& p : es.path)
      if (!p.reference && std::abs(p.coef) > 2.0 * p.se) ++outside;
    CHECK(outside <= 1);
  }
  SUBCASE("pre-period flat, post-period positive for leisure") {
    c.exposure_strength = 1.0;
    auto d = generate_long_difference(c);
    std::unordered_map<std::int64_t, double> e;
    for (const auto& h : d.households) e[h.household_id] = h.exposure;
    auto es = econ::event_study(econ::event_study_frame(d.records, Category::leisure), e, 0);
    for (const auto& p : es.path) {
      if (p.reference) CHECK(p.coef == 0.0);
      else if (p.quarter < 0) CHECK(std::abs(p.coef) < 3.0 * p.se);
      else if (p.quarter >= 4) CHECK(p.coef > 2.0 * p.se);
    }
  }
}

TEST_CASE("Engel generator") {
  DgpConfig c;
  SUBCASE("activities add up and the base point has the configured shares") {
    auto d = generate_engel_panel(c);
    CHECK(d.cells.size() == 36u * 12u);
    for (const auto& cell : d.cells) {
      double s = cell.hours[0] + cell.hours[1] + cell.hours[2];
      CHECK(std::abs(s - cell.total) < 1e-9 * cell.total);
    }
    CHECK(d.true_beta[0] == doctest::Approx(1.374).epsilon(1e-9));
    CHECK(d.true_beta[1] == doctest::Approx(0.931).epsilon(1e-9));
    CHECK(d.true_beta[2] == doctest::Approx(1.110).epsilon(1e-9));
  }
  SUBCASE("share form agrees with the log-log form; OLS agrees with IV") {
    auto d = generate_engel_panel(c);
    Frame f = engel_frame(d);
    auto iv = econ::engel_loglog(f, kActs, true);
    auto sh = econ::engel_shares(f, kActs, true);
    auto ls = econ::engel_loglog(f, kActs, false);
    for (std::size_t a = 0; a < 3; ++a) {
      CHECK(std::abs(sh.implied_beta_from_shares[a] - iv.beta[a]) < 0.05);
      CHECK(std::abs(ls.beta[a] - iv.beta[a]) < 2.0 * iv.beta_se[a]);
      CHECK(*iv.first_stage_f[a] > 100.0);
    }
  }
  // Coverage over replications rather than one draw: a single dataset puts
  // some coefficient past 2 SE about one time in nine.
  auto replicate = [&](DgpConfig cfg, int reps) {
    std::array<double, 3> mean_z{};
    int outside = 0;
    for (int r = 0; r < reps; ++r) {
      cfg.seed = 5000 + static_cast<std::uint64_t>(r);
      auto d = generate_engel_panel(cfg);
      auto iv = econ::engel_loglog(engel_frame(d), kActs, true);
      for (std::size_t a = 0; a < 3; ++a) {
        double z = (iv.beta[a] - d.true_beta[a]) / iv.beta_se[a];
        mean_z[a] += z / reps;
        if (std::abs(z) > 2.0) ++outside;
      }
    }
    return std::make_pair(mean_z, static_cast<double>(outside) / (3.0 * reps));
  };
  SUBCASE("IV recovers the elasticities across replications") {
    auto [mean_z, reject] = replicate(c, 60);
    MESSAGE("rejection rate at 2 SE ", reject);
    CHECK(reject < 0.12);
    for (double z : mean_z) CHECK(std::abs(z) < 0.45);
  }
  SUBCASE("equal curvature gives unit elasticities") {
    c.engel_etas = {1.2, 1.2, 1.2};
    auto d = generate_engel_panel(c);
    for (double b : d.true_beta) CHECK(b == doctest::Approx(1.0).epsilon(1e-12));
    auto [mean_z, reject] = replicate(c, 60);
    CHECK(reject < 0.12);
    for (double z : mean_z) CHECK(std::abs(z) < 0.45);
  }
  SUBCASE("no rain effect means a weak first stage") {
    c.rain_elasticity = 0.0;
    auto d = generate_engel_panel(c);
    auto iv = econ::engel_loglog(engel_frame(d), kActs, true);
    MESSAGE("F without rain ", *iv.first_stage_f[0]);
    CHECK(*iv.first_stage_f[0] < 10.0);
  }
}

TEST_CASE("interval generator") {
  DgpConfig c;
  SUBCASE("default gaps are recovered") {
    auto v = generate_intervals(c);
    CHECK(v.size() == 50000u);
    auto w = econ::window_contrast(v);
    MESSAGE("productive ", w.difference[0], " leisure ", w.difference[1]);
    CHECK(std::abs(w.difference[index(Category::productive)] - 0.252) < 0.01);
    CHECK(std::abs(w.difference[index(Category::leisure)] + 0.137) < 0.01);
    for (const auto& r : v)
      for (double d : r.duration) CHECK(d >= 0.0);
  }
  SUBCASE("zero gaps") {
    c.window_gap_productive = 0.0;
    c.window_gap_leisure = 0.0;
    auto w = econ::window_contrast(generate_intervals(c));
    for (double d : w.difference) CHECK(std::abs(d) < 0.01);
  }
  SUBCASE("never-user data has no windows") {
    auto v = generate_intervals(c);
    std::vector<IntervalRecord> never;
    for (const auto& r : v)
      if (!r.is_gpt_window) never.push_back(r);
    CHECK_THROWS_AS(econ::window_contrast(never), DataError);
  }
  SUBCASE("probabilities") {
    for (int s = 0; s < 48; ++s) {
      auto b = baseline_category_probs(s);
      auto g = gpt_category_probs(c, s);
      CHECK(b[0] + b[1] + b[2] + b[3] == doctest::Approx(1.0));
      CHECK(g[0] + g[1] + g[2] + g[3] == doctest::Approx(1.0));
      CHECK(g[0] - b[0] == doctest::Approx(0.252));
    }
  }
}
