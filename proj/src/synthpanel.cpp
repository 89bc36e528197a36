#include "digitime/synthpanel.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "digitime/errors.hpp"
#include "digitime/model.hpp"

namespace digitime::synth {

namespace {

constexpr std::array<double, 4> kBaseSeconds{60000.0, 10000.0, 30000.0, 2000.0};
constexpr std::array<double, 4> kNeverUserShares{0.549, 0.213, 0.2, 0.038};
constexpr double kDirichletConcentration = 20.0;

// Independent streams per generator so changing one panel's size leaves the others alone.
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return std::mt19937_64(seq);
}

struct Field {
  std::string name;
  std::function<double&(DgpConfig&)> real;
  std::function<std::int64_t&(DgpConfig&)> integer;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    auto r = [&](std::string n, std::function<double&(DgpConfig&)> g) { f.push_back({std::move(n), g, nullptr}); };
    auto i = [&](std::string n, std::function<std::int64_t&(DgpConfig&)> g) { f.push_back({std::move(n), nullptr, g}); };
    i("n_households", [](DgpConfig& c) -> auto& { return c.n_households; });
    i("n_quarters", [](DgpConfig& c) -> auto& { return c.n_quarters; });
    for (auto cat : kCategories)
      r("true_effects." + std::string(to_string(cat)), [cat](DgpConfig& c) -> auto& { return c.true_effects[index(cat)]; });
    r("exposure_strength", [](DgpConfig& c) -> auto& { return c.exposure_strength; });
    r("confound_strength", [](DgpConfig& c) -> auto& { return c.confound_strength; });
    r("adoption_intercept", [](DgpConfig& c) -> auto& { return c.adoption_intercept; });
    r("exposure_log_mean", [](DgpConfig& c) -> auto& { return c.exposure_log_mean; });
    r("exposure_log_sd", [](DgpConfig& c) -> auto& { return c.exposure_log_sd; });
    for (std::size_t a = 0; a < 3; ++a) {
      r(std::string("engel_etas.") + kEngelActivities[a], [a](DgpConfig& c) -> auto& { return c.engel_etas[a]; });
      r(std::string("engel_base_shares.") + kEngelActivities[a],
        [a](DgpConfig& c) -> auto& { return c.engel_base_shares[a]; });
    }
    r("engel_base_total", [](DgpConfig& c) -> auto& { return c.engel_base_total; });
    r("rain_elasticity", [](DgpConfig& c) -> auto& { return c.rain_elasticity; });
    r("precip_log_sd", [](DgpConfig& c) -> auto& { return c.precip_log_sd; });
    r("noise_sd.duration", [](DgpConfig& c) -> auto& { return c.noise_sd_duration; });
    r("noise_sd.total", [](DgpConfig& c) -> auto& { return c.noise_sd_total; });
    r("noise_sd.activity", [](DgpConfig& c) -> auto& { return c.noise_sd_activity; });
    r("household_sd", [](DgpConfig& c) -> auto& { return c.household_sd; });
    r("cell_sd", [](DgpConfig& c) -> auto& { return c.cell_sd; });
    r("time_sd", [](DgpConfig& c) -> auto& { return c.time_sd; });
    i("demographic_cells.income", [](DgpConfig& c) -> auto& { return c.n_income; });
    i("demographic_cells.age", [](DgpConfig& c) -> auto& { return c.n_age; });
    i("demographic_cells.region", [](DgpConfig& c) -> auto& { return c.n_regions; });
    i("n_intervals", [](DgpConfig& c) -> auto& { return c.n_intervals; });
    r("user_share", [](DgpConfig& c) -> auto& { return c.user_share; });
    r("gpt_window_prob", [](DgpConfig& c) -> auto& { return c.gpt_window_prob; });
    r("window_gap.productive", [](DgpConfig& c) -> auto& { return c.window_gap_productive; });
    r("window_gap.leisure", [](DgpConfig& c) -> auto& { return c.window_gap_leisure; });
    return f;
  }();
  return table;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid config: " + what);
}

}  // namespace

int DgpConfig::first_quarter() const {
  std::int64_t n_pre = std::max<std::int64_t>(4, n_quarters / 2 - 1);
  return static_cast<int>(1 - n_pre);
}

int DgpConfig::last_quarter() const { return static_cast<int>(n_quarters) + first_quarter() - 1; }

void DgpConfig::validate() const {
  require(n_households >= 2, "n_households must be at least 2");
  require(n_quarters >= 8, "n_quarters must be at least 8 (four pre, four post)");
  require(std::isfinite(exposure_strength), "exposure_strength must be finite");
  require(confound_strength >= 0.0 && confound_strength < 1.0, "confound_strength must be in [0, 1)");
  require(exposure_log_sd > 0.0, "exposure_log_sd must be positive (exposure needs variance)");
  for (double e : true_effects) require(std::isfinite(e), "true_effects must be finite");
  double share_sum = 0.0;
  for (std::size_t a = 0; a < 3; ++a) {
    require(engel_etas[a] > 0.0, "engel_etas must be positive");
    require(engel_base_shares[a] > 0.0, "engel_base_shares must be positive");
    share_sum += engel_base_shares[a];
  }
  require(std::abs(share_sum - 1.0) < 1e-9, "engel_base_shares must sum to 1");
  require(engel_base_total > 0.0, "engel_base_total must be positive");
  require(rain_elasticity >= 0.0, "rain_elasticity must be non-negative");
  for (double sd : {precip_log_sd, noise_sd_duration, noise_sd_total, noise_sd_activity, household_sd, cell_sd, time_sd})
    require(sd > 0.0, "all noise standard deviations must be positive");
  require(n_income >= 1 && n_income <= 8, "demographic_cells.income must be in 1..8");
  require(n_age >= 1 && n_age <= 6, "demographic_cells.age must be in 1..6");
  require(n_regions >= 1, "demographic_cells.region must be positive");
  require(n_intervals >= 1, "n_intervals must be positive");
  require(user_share > 0.0 && user_share < 1.0, "user_share must be in (0, 1)");
  require(gpt_window_prob > 0.0 && gpt_window_prob <= 1.0, "gpt_window_prob must be in (0, 1]");
  for (int slot = 0; slot < 48; ++slot)
    for (double p : gpt_category_probs(*this, slot))
      require(p > 0.0, "window gaps leave a non-positive category probability");
}

void DgpConfig::set(const std::string& key, const std::string& value) {
  auto parse_error = [&] { return ConfigError("bad value '" + value + "' for config key '" + key + "'"); };
  if (key == "seed") {
    auto res = std::from_chars(value.data(), value.data() + value.size(), seed);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size()) throw parse_error();
    return;
  }
  for (const auto& f : fields()) {
    if (f.name != key) continue;
    if (f.integer) {
      std::int64_t v = 0;
      auto res = std::from_chars(value.data(), value.data() + value.size(), v);
      if (res.ec != std::errc() || res.ptr != value.data() + value.size()) throw parse_error();
      f.integer(*this) = v;
    } else {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &used);
      } catch (const std::exception&) {
        throw parse_error();
      }
      if (used != value.size()) throw parse_error();
      f.real(*this) = v;
    }
    return;
  }
  throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> DgpConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out{{"seed", std::to_string(seed)}};
  DgpConfig copy = *this;
  for (const auto& f : fields())
    out.emplace_back(f.name, f.integer ? std::to_string(f.integer(copy)) : fmt17(f.real(copy)));
  return out;
}

std::array<double, 4> baseline_category_probs(int hour_bucket) {
  double tilt = 0.05 * std::sin(2.0 * std::numbers::pi * hour_bucket / 48.0);
  auto p = kNeverUserShares;
  p[index(Category::productive)] -= tilt;
  p[index(Category::leisure)] += tilt;
  return p;
}

std::array<double, 4> gpt_category_probs(const DgpConfig& config, int hour_bucket) {
  auto p = baseline_category_probs(hour_bucket);
  double rest = -(config.window_gap_productive + config.window_gap_leisure);
  double other = p[index(Category::mixed)] + p[index(Category::adcdn)];
  p[index(Category::productive)] += config.window_gap_productive;
  p[index(Category::leisure)] += config.window_gap_leisure;
  double m = p[index(Category::mixed)], a = p[index(Category::adcdn)];
  p[index(Category::mixed)] = m + rest * m / other;
  p[index(Category::adcdn)] = a + rest * a / other;
  return p;
}

LongDifferenceData generate_long_difference(const DgpConfig& config) {
  config.validate();
  auto rng = stream(config.seed, 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int q0 = config.first_quarter(), q1 = config.last_quarter();
  const int n_q = q1 - q0 + 1;
  const auto n_cells = static_cast<std::size_t>(config.n_cells());
  const int last_adopt = q1 - 3;  // adopters are treated throughout the last four quarters

  std::vector<double> cell_effect(n_cells);
  for (auto& k : cell_effect) k = config.cell_sd * normal(rng);
  // quarter x cell x category time effects
  std::vector<double> tau(static_cast<std::size_t>(n_q) * n_cells * 4);
  for (auto& t : tau) t = config.time_sd * normal(rng);

  LongDifferenceData out;
  out.true_effects = config.true_effects;
  const auto n = static_cast<std::size_t>(config.n_households);
  out.households.reserve(n);
  const double c = config.confound_strength;
  for (std::size_t i = 0; i < n; ++i) {
    HouseholdTruth h;
    h.household_id = static_cast<std::int64_t>(i + 1);
    h.income_bin = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.n_income));
    h.age_bin = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.n_age));
    h.region_id = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.n_regions));
    h.cell = ((h.income_bin - 1) * static_cast<int>(config.n_age) + (h.age_bin - 1)) * static_cast<int>(config.n_regions) +
             (h.region_id - 1);
    double ln_e = std::min(0.0, config.exposure_log_mean + config.exposure_log_sd * normal(rng));
    h.exposure = std::exp(ln_e);
    h.coverage = 0.6 + 0.35 * unit(rng);
    h.confound = normal(rng);
    double v = normal(rng);
    double shock = c * h.confound + std::sqrt(1.0 - c * c) * v;
    h.adoption_index = config.adoption_intercept + config.exposure_strength * (ln_e - config.exposure_log_mean) +
                       cell_effect[static_cast<std::size_t>(h.cell)] + shock;
    h.adopted = h.adoption_index > 0.0;
    int when = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(last_adopt));
    h.first_use_quarter = h.adopted ? when : 0;
    out.households.push_back(h);
  }

  const std::size_t n_rec = n * static_cast<std::size_t>(n_q) * 4;
  out.records.reserve(n_rec);
  out.log_counterfactual.reserve(n_rec);
  out.log_noise_free.reserve(n_rec);
  for (const auto& h : out.households) {
    std::array<double, 4> alpha{};
    for (auto& a : alpha) a = config.household_sd * normal(rng);
    for (int q = q0; q <= q1; ++q) {
      for (auto cat : kCategories) {
        std::size_t k = index(cat);
        double cf = std::log(kBaseSeconds[k]) + alpha[k] +
                    tau[(static_cast<std::size_t>(q - q0) * n_cells + static_cast<std::size_t>(h.cell)) * 4 + k];
        if (cat == Category::leisure && q >= 1) cf += h.confound;
        bool treated = h.adopted && q >= h.first_use_quarter;
        double realized = treated ? cf + config.true_effects[k] : cf;
        double noisy = realized + config.noise_sd_duration * normal(rng);
        PanelRecord r;
        r.household_id = h.household_id;
        r.quarter = q;
        r.income_bin = h.income_bin;
        r.age_bin = h.age_bin;
        r.region_id = h.region_id;
        r.category = cat;
        r.duration_seconds = std::exp(noisy);
        r.weight = 1.0;
        out.records.push_back(r);
        out.log_counterfactual.push_back(cf);
        out.log_noise_free.push_back(realized);
      }
    }
  }
  return out;
}

EngelData generate_engel_panel(const DgpConfig& config) {
  config.validate();
  auto rng = stream(config.seed, 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n_cells = static_cast<int>(config.n_cells());
  const int n_q = static_cast<int>(config.n_quarters);

  // Taste shifters put the base allocation at the configured shares with omega = 1.
  std::array<ActivityParams, 3> params;
  for (std::size_t a = 0; a < 3; ++a) {
    double eta = config.engel_etas[a];
    double target = config.engel_base_shares[a] * config.engel_base_total;
    double theta = std::abs(eta - 1.0) < kLogBranchBand ? 1.0 : std::pow(target, 1.0 / (eta - 1.0));
    params[a] = ActivityParams{theta, 1.0, eta};
  }
  Preferences prefs = Preferences::three(params[0], params[1], params[2]);

  EngelData out;
  auto base = solve_allocation(prefs, config.engel_base_total);
  double eta_bar = mean_curvature(prefs, base);
  for (std::size_t a = 0; a < 3; ++a) out.true_beta[a] = config.engel_etas[a] / eta_bar;

  std::vector<double> mu(static_cast<std::size_t>(n_cells)), tq(static_cast<std::size_t>(n_q));
  for (auto& m : mu) m = 2.0 * config.noise_sd_total * normal(rng);
  for (auto& t : tq) t = config.noise_sd_total * normal(rng);
  for (int g = 0; g < n_cells; ++g)
    for (int q = 0; q < n_q; ++q) {
      EngelCell cell;
      cell.cell_id = g + 1;
      cell.quarter = config.first_quarter() + q;
      cell.log_precip = config.precip_log_sd * normal(rng);
      double ln_total = std::log(config.engel_base_total) + mu[static_cast<std::size_t>(g)] +
                        tq[static_cast<std::size_t>(q)] + config.rain_elasticity * cell.log_precip +
                        config.noise_sd_total * normal(rng);
      cell.total = std::exp(ln_total);
      auto alloc = solve_allocation(prefs, cell.total);
      double sum = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        cell.hours[a] = alloc.hours[a] * std::exp(config.noise_sd_activity * normal(rng));
        sum += cell.hours[a];
      }
      // renormalize so the activities add up to the (exogenous) total
      for (auto& h : cell.hours) h *= cell.total / sum;
      out.cells.push_back(cell);
    }
  return out;
}

std::vector<IntervalRecord> generate_intervals(const DgpConfig& config) {
  config.validate();
  auto rng = stream(config.seed, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n_hh = static_cast<std::uint64_t>(config.n_households);

  struct Hh {
    int income, age;
    bool user;
  };
  std::vector<Hh> hh(n_hh);
  for (auto& h : hh) {
    h.income = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.n_income));
    h.age = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(config.n_age));
    h.user = unit(rng) < config.user_share;
  }

  std::vector<IntervalRecord> out;
  out.reserve(static_cast<std::size_t>(config.n_intervals));
  for (std::int64_t i = 0; i < config.n_intervals; ++i) {
    IntervalRecord r;
    auto id = rng() % n_hh;
    const auto& h = hh[id];
    r.household_id = static_cast<std::int64_t>(id + 1);
    r.income_bin = h.income;
    r.age_bin = h.age;
    r.day_of_week = static_cast<int>(rng() % 7);
    r.hour_bucket = static_cast<int>(rng() % 48);
    r.is_gpt_window = h.user && unit(rng) < config.gpt_window_prob;
    auto p = r.is_gpt_window ? gpt_category_probs(config, r.hour_bucket) : baseline_category_probs(r.hour_bucket);
    double length = 60.0 + 1740.0 * unit(rng);
    std::array<double, 4> g{};
    double sum = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      g[k] = std::gamma_distribution<double>(kDirichletConcentration * p[k], 1.0)(rng);
      sum += g[k];
    }
    for (std::size_t k = 0; k < 4; ++k) r.duration[k] = length * g[k] / sum;
    out.push_back(r);
  }
  return out;
}

}  // namespace digitime::synth
