#pragma once

// Synthetic household panels with known ground truth: the exposure ->
// adoption -> reallocation long difference, the cell-level Engel panel and
// the 30-minute interval data for the GPT-window contrast.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "digitime/records.hpp"

namespace digitime::synth {

struct DgpConfig {
  std::int64_t n_households = 10000;
  std::int64_t n_quarters = 12;
  std::uint64_t seed = 20221130;

  // log-duration effects of adoption, indexed by Category
  std::array<double, 4> true_effects{0.011, 1.512, -0.285, 0.0};
  double exposure_strength = 0.35;   // slope of the adoption index on ln exposure
  double confound_strength = 0.5;    // corr(adoption shock, leisure demand shock)
  double adoption_intercept = -0.85;
  double exposure_log_mean = -2.302585092994046;  // ln 0.1
  double exposure_log_sd = 0.5;

  // leisure, productive, other
  std::array<double, 3> engel_etas{1.374, 0.931, 1.110};
  std::array<double, 3> engel_base_shares{0.09514672686230248, 0.7548532731376975, 0.15};
  double engel_base_total = 100.0;
  double rain_elasticity = 0.3;
  double precip_log_sd = 0.5;

  // per-outcome noise sds
  double noise_sd_duration = 0.5;
  double noise_sd_total = 0.05;
  double noise_sd_activity = 0.03;
  double household_sd = 0.5;
  double cell_sd = 0.3;
  double time_sd = 0.1;

  // demographic_cells: income bins x age bins x regions
  std::int64_t n_income = 4;
  std::int64_t n_age = 3;
  std::int64_t n_regions = 3;

  std::int64_t n_intervals = 50000;
  double user_share = 0.3;
  double gpt_window_prob = 0.5;
  double window_gap_productive = 0.252;
  double window_gap_leisure = -0.137;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  std::int64_t n_cells() const { return n_income * n_age * n_regions; }
  int first_quarter() const;  // pre-period quarters are first_quarter..0
  int last_quarter() const;   // post-period quarters are 1..last_quarter

  /// Sets one field by its config-file key ("true_effects.leisure", "seed", ...).
  void set(const std::string& key, const std::string& value);
  /// All keys with their values, in a fixed order, values printed with 17 digits.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

struct HouseholdTruth {
  std::int64_t household_id = 0;
  int income_bin = 1, age_bin = 1, region_id = 1;
  int cell = 0;
  double exposure = 0.0;
  double coverage = 0.0;
  double confound = 0.0;  // u, the leisure demand shock
  double adoption_index = 0.0;
  bool adopted = false;
  int first_use_quarter = 0;  // 0 when never adopted
};

struct LongDifferenceData {
  std::vector<PanelRecord> records;  // ordered by household, quarter, category
  std::vector<HouseholdTruth> households;
  // Noise-free log durations aligned with `records`.
  std::vector<double> log_counterfactual;
  std::vector<double> log_noise_free;
  std::array<double, 4> true_effects{};
};

LongDifferenceData generate_long_difference(const DgpConfig& config);

inline constexpr std::array<const char*, 3> kEngelActivities{"leisure", "productive", "other"};

struct EngelCell {
  int cell_id = 0;
  int quarter = 0;
  double total = 0.0;
  double log_precip = 0.0;
  std::array<double, 3> hours{};  // leisure, productive, other
};

struct EngelData {
  std::vector<EngelCell> cells;
  std::array<double, 3> true_beta{};  // eta_a / mean curvature at the base total
};

EngelData generate_engel_panel(const DgpConfig& config);

std::vector<IntervalRecord> generate_intervals(const DgpConfig& config);

/// Never-user category probabilities in a half-hour slot, and the GPT-window
/// probabilities after applying the configured gaps.
std::array<double, 4> baseline_category_probs(int hour_bucket);
std::array<double, 4> gpt_category_probs(const DgpConfig& config, int hour_bucket);

}  // namespace digitime::synth
