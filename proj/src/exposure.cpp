#include "digitime/exposure.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <tuple>

#include "digitime/errors.hpp"

namespace digitime::exposure {

namespace {

double sorted_sum(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

bool valid_date(const std::string& d) {
  if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (!std::isdigit(static_cast<unsigned char>(d[i]))) return false;
  int month = std::stoi(d.substr(5, 2)), day = std::stoi(d.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

bool valid_fips(const std::string& f) {
  return f.size() == 5 && std::all_of(f.begin(), f.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string normalize_domain(std::string_view domain) {
  std::size_t b = 0, e = domain.size();
  while (b < e && std::isspace(static_cast<unsigned char>(domain[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(domain[e - 1]))) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += static_cast<char>(std::tolower(static_cast<unsigned char>(domain[i])));
  if (out.rfind("www.", 0) == 0) out.erase(0, 4);
  return out;
}

LabelSet::LabelSet(const std::vector<WebsiteLabel>& labels) {
  for (const auto& l : labels) add(l);
}

void LabelSet::add(WebsiteLabel label) {
  label.domain = normalize_domain(label.domain);
  if (label.domain.empty()) throw DataError("empty domain in label set");
  if (label.exposure_count < 0 || label.exposure_count > 5)
    throw DataError("exposure_count for '" + label.domain + "' must be in 0..5");
  if (labels_.count(label.domain)) throw DataError("duplicate label for domain '" + label.domain + "'");
  labels_.emplace(label.domain, std::move(label));
}

const WebsiteLabel* LabelSet::find(std::string_view domain) const {
  auto it = labels_.find(domain);
  return it == labels_.end() ? nullptr : &it->second;
}

ScoreResult website_exposure_score(const std::vector<bool>& flags) {
  if (flags.size() > 5) throw DataError("at most five activity flags per website, got " + std::to_string(flags.size()));
  ScoreResult r;
  r.padded = flags.size() < 5;
  r.score = static_cast<int>(std::count(flags.begin(), flags.end(), true));
  return r;
}

std::vector<HouseholdExposure> household_exposure(std::span<const BrowseShare> shares, const LabelSet& labels) {
  std::map<std::int64_t, HouseholdExposure> acc;
  std::map<std::int64_t, double> total;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const auto& s = shares[i];
    if (!(s.share >= 0.0 && s.share <= 1.0))
      throw DataError("share outside [0,1] in row " + std::to_string(i + 1));
    auto& h = acc[s.household_id];
    h.household_id = s.household_id;
    total[s.household_id] += s.share;
    if (const auto* l = labels.find(normalize_domain(s.domain))) {
      h.coverage += s.share;
      if (highly_exposed(l->exposure_count)) h.exposure += s.share;
    }
  }
  std::vector<HouseholdExposure> out;
  for (const auto& [id, h] : acc) {
    if (std::abs(total[id] - 1.0) > 1e-9)
      throw DataError("browsing shares of household " + std::to_string(id) + " sum to " + std::to_string(total[id]));
    out.push_back(h);
  }
  return out;
}

std::vector<PurposeShares> purpose_shares(std::span<const DomainDuration> durations, const LabelSet& labels) {
  std::map<std::int64_t, PurposeShares> acc;
  for (std::size_t i = 0; i < durations.size(); ++i) {
    const auto& d = durations[i];
    if (!(d.duration_seconds >= 0.0) || !std::isfinite(d.duration_seconds))
      throw DataError("negative duration in row " + std::to_string(i + 1));
    auto& p = acc[d.household_id];
    p.household_id = d.household_id;
    p.total_seconds += d.duration_seconds;
    if (const auto* l = labels.find(normalize_domain(d.domain)))
      p.share[index(l->purpose)] += d.duration_seconds;
    else
      p.unlabeled += d.duration_seconds;
  }
  std::vector<PurposeShares> out;
  for (auto& [id, p] : acc) {
    if (p.total_seconds > 0.0) {
      for (auto& s : p.share) s /= p.total_seconds;
      p.unlabeled /= p.total_seconds;
    }
    out.push_back(p);
  }
  return out;
}

WeatherAggregate aggregate_weather(std::span<const WeatherGridRecord> grid,
                                   const std::map<std::string, int>& county_to_region) {
  std::set<std::pair<std::string, std::string>> seen;
  std::map<std::pair<std::string, std::string>, std::vector<double>> county_day;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = grid[i];
    const std::string row = " in row " + std::to_string(i + 1);
    if (!valid_fips(r.county_fips)) throw DataError("county_fips must be five digits" + row);
    if (!valid_date(r.date)) throw DataError("date must be YYYY-MM-DD" + row);
    if (!(r.prec >= 0.0) || !std::isfinite(r.prec)) throw DataError("precipitation must be non-negative" + row);
    if (!seen.emplace(r.grid_cell, r.date).second)
      throw DataError("duplicate grid_cell/date (" + r.grid_cell + ", " + r.date + ")" + row);
    county_day[{r.county_fips, r.date}].push_back(r.prec);
  }

  std::map<std::pair<std::string, std::string>, std::vector<double>> county_month;
  for (auto& [key, v] : county_day) {
    double n = static_cast<double>(v.size());
    county_month[{key.first, key.second.substr(0, 7)}].push_back(sorted_sum(v) / n);
  }

  WeatherAggregate out;
  std::set<std::string> unmapped;
  std::map<std::pair<int, std::string>, std::vector<double>> region_month;
  for (auto& [key, v] : county_month) {
    auto it = county_to_region.find(key.first);
    if (it == county_to_region.end()) {
      unmapped.insert(key.first);
      continue;
    }
    double n = static_cast<double>(v.size());
    region_month[{it->second, key.second}].push_back(sorted_sum(v) / n);
  }
  for (auto& [key, v] : region_month) {
    RegionMonth rm;
    rm.region_id = key.first;
    rm.month = key.second;
    rm.counties = v.size();
    rm.mean_prec = sorted_sum(v) / static_cast<double>(v.size());
    out.rows.push_back(rm);
  }
  out.unmapped.assign(unmapped.begin(), unmapped.end());
  out.dropped_counties = out.unmapped.size();
  return out;
}

}  // namespace digitime::exposure
