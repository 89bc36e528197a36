#include <algorithm>
#include <cmath>
#include <set>

#include "digitime/econometrics.hpp"
#include "digitime/errors.hpp"

namespace digitime::econ {

namespace {

double cell_code(const PanelRecord& r) {
  return static_cast<double>((r.income_bin * 100 + r.age_bin) * 10000 + r.region_id);
}

}  // namespace

LongDifferenceResult long_difference(std::span<const PanelRecord> panel,
                                     const std::map<std::int64_t, HouseholdInputs>& households, bool placebo) {
  std::set<int> quarters;
  for (const auto& r : panel) quarters.insert(r.quarter);
  LongDifferenceResult res;
  std::vector<int> pre, post;
  for (int q : quarters) (q <= 0 ? pre : post).push_back(q);
  if (placebo) {
    if (pre.size() < 3) throw DataError("placebo long difference needs at least three pre-period quarters");
    post.assign(pre.end() - 2, pre.end());
    pre.resize(pre.size() - 2);
  } else {
    if (pre.empty() || post.size() < 4) throw DataError("long difference needs pre quarters and four post quarters");
    post.erase(post.begin(), post.end() - 4);
  }
  res.pre_quarters = pre;
  res.post_quarters = post;
  std::set<int> pre_set(pre.begin(), pre.end()), post_set(post.begin(), post.end());

  // household -> category -> (sum, count) per window
  struct Acc {
    double pre_sum = 0, post_sum = 0;
    int pre_n = 0, post_n = 0;
  };
  std::map<std::int64_t, std::array<Acc, 4>> acc;
  std::map<std::int64_t, double> cell;
  for (const auto& r : panel) {
    if (r.duration_seconds < 0.0 || !std::isfinite(r.duration_seconds))
      throw DataError("negative duration for household " + std::to_string(r.household_id));
    auto& a = acc[r.household_id][index(r.category)];
    cell[r.household_id] = cell_code(r);
    if (!(r.duration_seconds > 0.0)) continue;
    double l = std::log(r.duration_seconds);
    if (pre_set.count(r.quarter)) {
      a.pre_sum += l;
      ++a.pre_n;
    } else if (post_set.count(r.quarter)) {
      a.post_sum += l;
      ++a.post_n;
    }
  }

  for (auto cat : kCategories) {
    std::vector<double> dy, d, z, cov, cl;
    for (const auto& [id, cats] : acc) {
      auto it = households.find(id);
      if (it == households.end()) throw DataError("no exposure/adoption row for household " + std::to_string(id));
      if (!(it->second.exposure > 0.0)) {
        if (cat == Category::productive) ++res.dropped_zero_exposure;
        continue;
      }
      const auto& a = cats[index(cat)];
      if (a.pre_n == 0 || a.post_n == 0) {
        ++res.dropped_missing_window;
        continue;
      }
      dy.push_back(a.post_sum / a.post_n - a.pre_sum / a.pre_n);
      d.push_back(it->second.ever_used ? 1.0 : 0.0);
      z.push_back(std::log(it->second.exposure));
      cov.push_back(it->second.coverage);
      cl.push_back(cell.at(id));
    }
    if (cat == Category::productive) res.households = dy.size();
    Frame f(dy.size());
    f.add("delta_log_duration", std::move(dy));
    f.add("gpt_use", std::move(d));
    f.add("ln_exposure", std::move(z));
    f.add("coverage", std::move(cov));
    f.add("cell", std::move(cl));

    RegressionSpec spec;
    spec.outcome = "delta_log_duration";
    spec.regressors = {"coverage"};
    spec.endogenous = "gpt_use";
    spec.instrument = "ln_exposure";
    spec.fixed_effects = {{"cell"}};
    spec.clusters = {{"cell"}};
    LongDifferenceEstimate est;
    est.category = cat;
    est.iv = tsls(spec, f);
    RegressionSpec o = spec;
    o.endogenous.reset();
    o.instrument.reset();
    o.regressors = {"gpt_use", "coverage"};
    est.ols = ols(o, f);
    res.by_category.push_back(std::move(est));
  }
  return res;
}

Frame event_study_frame(std::span<const PanelRecord> panel, Category category) {
  std::vector<double> hh, q, cell, dur;
  for (const auto& r : panel) {
    if (r.category != category) continue;
    hh.push_back(static_cast<double>(r.household_id));
    q.push_back(r.quarter);
    cell.push_back(cell_code(r));
    dur.push_back(r.duration_seconds);
  }
  Frame f(hh.size());
  f.add("household_id", std::move(hh));
  f.add("quarter", std::move(q));
  f.add("cell", std::move(cell));
  f.add("duration_seconds", std::move(dur));
  return f;
}

}  // namespace digitime::econ
