#pragma once

// Measurement layer: website exposure scores, the household exposure
// instrument, purpose shares and the rainfall crosswalk aggregation.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "digitime/records.hpp"

namespace digitime::exposure {

/// Lowercase, trim, drop a leading "www.".
std::string normalize_domain(std::string_view domain);

struct WebsiteLabel {
  std::string domain;
  Category purpose = Category::mixed;
  int exposure_count = 0;  // 0..5 exposed activities among the site's top five
};

class LabelSet {
 public:
  LabelSet() = default;
  explicit LabelSet(const std::vector<WebsiteLabel>& labels);

  /// Normalizes the domain; duplicates and counts outside 0..5 are errors.
  void add(WebsiteLabel label);
  const WebsiteLabel* find(std::string_view domain) const;  // expects a normalized domain
  std::size_t size() const { return labels_.size(); }
  const std::map<std::string, WebsiteLabel, std::less<>>& all() const { return labels_; }

 private:
  std::map<std::string, WebsiteLabel, std::less<>> labels_;
};

inline bool highly_exposed(int exposure_count) { return exposure_count >= 4; }

struct ScoreResult {
  int score = 0;
  bool padded = false;  // fewer than five flags were given
};

ScoreResult website_exposure_score(const std::vector<bool>& activity_flags);

struct BrowseShare {
  std::int64_t household_id = 0;
  std::string domain;
  double share = 0.0;
};

struct HouseholdExposure {
  std::int64_t household_id = 0;
  double exposure = 0.0;  // share on sites with 4 or 5 exposed activities
  double coverage = 0.0;  // share on any labeled site
};

/// One row per household, ascending id. Shares must lie in [0,1] and sum to
/// 1 within 1e-9 per household.
std::vector<HouseholdExposure> household_exposure(std::span<const BrowseShare> shares, const LabelSet& labels);

struct DomainDuration {
  std::int64_t household_id = 0;
  std::string domain;
  double duration_seconds = 0.0;
};

struct PurposeShares {
  std::int64_t household_id = 0;
  std::array<double, 4> share{};  // indexed by Category
  double unlabeled = 0.0;
  double total_seconds = 0.0;
};

/// Households with zero total duration get all-zero shares.
std::vector<PurposeShares> purpose_shares(std::span<const DomainDuration> durations, const LabelSet& labels);

struct WeatherGridRecord {
  std::string grid_cell;
  std::string county_fips;  // five digits
  std::string date;         // YYYY-MM-DD
  double prec = 0.0;
};

struct RegionMonth {
  int region_id = 0;
  std::string month;  // YYYY-MM
  double mean_prec = 0.0;
  std::size_t counties = 0;
};

struct WeatherAggregate {
  std::vector<RegionMonth> rows;  // sorted by (region, month)
  std::size_t dropped_counties = 0;
  std::vector<std::string> unmapped;
};

/// grid -> county daily mean -> county-month mean daily rate -> region
/// unweighted mean over counties. Sums run over sorted values, so the result
/// does not depend on input row order.
WeatherAggregate aggregate_weather(std::span<const WeatherGridRecord> grid,
                                   const std::map<std::string, int>& county_to_region);

}  // namespace digitime::exposure
