#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "digitime/econometrics.hpp"
#include "digitime/errors.hpp"

namespace digitime {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::productive: return "productive";
    case Category::leisure: return "leisure";
    case Category::mixed: return "mixed";
    case Category::adcdn: return "adcdn";
  }
  return "?";
}

Category parse_category(std::string_view s) {
  for (auto c : kCategories)
    if (to_string(c) == s) return c;
  throw DataError("unknown category '" + std::string(s) + "'");
}

}  // namespace digitime

namespace digitime::econ {

namespace {
using MatchCell = std::tuple<int, int, int, int>;
using Durations = std::array<double, 4>;

MatchCell match_cell(const IntervalRecord& r) { return {r.day_of_week, r.hour_bucket, r.income_bin, r.age_bin}; }
}  // namespace

WindowContrast window_contrast(std::span<const IntervalRecord> intervals) {
  std::set<std::int64_t> users;
  for (const auto& r : intervals) {
    for (double d : r.duration)
      if (d < 0.0 || !std::isfinite(d)) throw DataError("interval durations must be non-negative");
    if (r.is_gpt_window) users.insert(r.household_id);
  }

  WindowContrast out;
  std::map<MatchCell, Durations> gpt, control;
  for (const auto& r : intervals) {
    if (r.is_gpt_window) {
      auto& g = gpt[match_cell(r)];
      for (std::size_t k = 0; k < 4; ++k) g[k] += r.duration[k];
      ++out.gpt_windows;
    } else if (!users.count(r.household_id)) {
      auto& c = control[match_cell(r)];
      for (std::size_t k = 0; k < 4; ++k) c[k] += r.duration[k];
      ++out.control_intervals;
    }
  }
  if (out.gpt_windows == 0) throw DataError("no GPT windows in the interval data");

  Durations gsum{}, csum{};
  double weight_total = 0.0;
  for (const auto& [cell, g] : gpt) {
    double gtot = g[0] + g[1] + g[2] + g[3];
    auto it = control.find(cell);
    double ctot = 0.0;
    if (it != control.end()) ctot = it->second[0] + it->second[1] + it->second[2] + it->second[3];
    if (ctot <= 0.0) {
      ++out.cells_dropped;
      continue;
    }
    if (gtot <= 0.0) continue;
    ++out.cells_used;
    weight_total += gtot;
    for (std::size_t k = 0; k < 4; ++k) {
      gsum[k] += g[k];
      csum[k] += gtot * it->second[k] / ctot;
    }
  }
  if (weight_total <= 0.0) throw DataError("no GPT window has a matching never-user interval");
  for (std::size_t k = 0; k < 4; ++k) {
    out.gpt_share[k] = gsum[k] / weight_total;
    out.control_share[k] = csum[k] / weight_total;
    out.difference[k] = out.gpt_share[k] - out.control_share[k];
  }
  return out;
}

std::map<DemoCell, double> raking_weights(const std::map<DemoCell, long>& sample_counts,
                                          const std::map<DemoCell, double>& target_shares) {
  double target_sum = 0.0;
  for (const auto& [cell, t] : target_shares) {
    if (t < 0.0 || !std::isfinite(t)) throw DataError("target shares must be non-negative");
    target_sum += t;
  }
  long n = 0;
  for (const auto& [cell, c] : sample_counts) {
    if (c < 0) throw DataError("sample counts must be non-negative");
    n += c;
  }
  if (!(target_sum > 0.0) || n == 0) throw DataError("empty sample or targets");

  std::map<DemoCell, double> out;
  for (const auto& [cell, c] : sample_counts) {
    if (c == 0) continue;
    auto it = target_shares.find(cell);
    if (it == target_shares.end() || it->second == 0.0)
      throw DataError("sample cell (" + std::to_string(cell.first) + "," + std::to_string(cell.second) +
                      ") has no population target");
    out[cell] = (it->second / target_sum) / (static_cast<double>(c) / static_cast<double>(n));
  }
  for (const auto& [cell, t] : target_shares) {
    if (t > 0.0 && !out.count(cell))
      throw DataError("population cell (" + std::to_string(cell.first) + "," + std::to_string(cell.second) +
                      ") has no sample observations");
  }
  return out;
}

}  // namespace digitime::econ
