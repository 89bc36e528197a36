#include "digitime/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "digitime/econometrics.hpp"
#include "digitime/errors.hpp"
#include "digitime/exposure.hpp"
#include "digitime/io.hpp"

namespace digitime::pipeline {

using nlohmann::ordered_json;

namespace {

std::string fmt2(double v) {
  if (!std::isfinite(v)) return "n/a";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

void write_json(const fs::path& path, const ordered_json& j) { io::write_text(path, j.dump(2) + "\n"); }

ordered_json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

// NaN becomes null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json regression_json(const econ::RegressionResult& r, const std::string& term) {
  ordered_json j;
  j["term"] = term;
  j["coefficient"] = num(r.coef(term));
  j["se"] = num(r.se(term));
  j["t"] = num(r.t_stats(r.index_of(term)));
  j["n"] = r.n_obs;
  j["k"] = r.n_params;
  j["clusters"] = r.n_clusters;
  j["first_stage_f"] = r.first_stage_f ? num(*r.first_stage_f) : ordered_json(nullptr);
  j["weak_instrument"] = r.weak_instrument;
  ordered_json terms = ordered_json::object();
  for (std::size_t i = 0; i < r.names.size(); ++i)
    terms[r.names[i]] = {{"coefficient", num(r.coefficients(i))}, {"se", num(r.std_errors(i))}};
  j["terms"] = terms;
  return j;
}

ordered_json engel_json(const econ::EngelEstimates& e) {
  ordered_json j = ordered_json::object();
  for (std::size_t a = 0; a < e.activities.size(); ++a) {
    ordered_json r;
    r["beta"] = num(e.beta[a]);
    r["beta_se"] = num(e.beta_se[a]);
    r["gamma"] = e.gamma[a] ? num(*e.gamma[a]) : ordered_json(nullptr);
    r["gamma_se"] = e.gamma_se[a] ? num(*e.gamma_se[a]) : ordered_json(nullptr);
    r["mean_share"] = num(e.mean_share[a]);
    r["first_stage_f"] = e.first_stage_f[a] ? num(*e.first_stage_f[a]) : ordered_json(nullptr);
    r["n"] = e.n_obs[a];
    r["dropped"] = e.dropped[a];
    j[e.activities[a]] = r;
  }
  return j;
}

double get_number(const ordered_json& j, const std::string& what) {
  if (!j.is_number()) throw DataError("estimates: '" + what + "' is missing or not a number");
  return j.get<double>();
}

const ordered_json& child(const ordered_json& j, const std::string& key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw DataError(what + ": missing '" + key + "'");
  return j.at(key);
}

// One line of an aligned text table.
std::string row(const std::vector<std::string>& cells, const std::vector<int>& widths) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    char buf[128];
    std::snprintf(buf, sizeof buf, i == 0 ? "%-*s" : "%*s", widths[i], cells[i].c_str());
    s += buf;
  }
  return s + "\n";
}

std::optional<double> golden_for(double eta_bar, double psi) {
  for (std::size_t r = 0; r < calib::kTable8EtaBars.size(); ++r)
    for (std::size_t c = 0; c < calib::kTable8Psis.size(); ++c)
      if (std::abs(calib::kTable8EtaBars[r] - eta_bar) < 1e-12 && std::abs(calib::kTable8Psis[c] - psi) < 1e-12)
        return calib::kTable8Golden[r * calib::kTable8Psis.size() + c];
  return std::nullopt;
}

void write_grid(const std::vector<calib::CalibrationCell>& cells, const fs::path& path, Format format,
                const ordered_json& inputs) {
  if (format == Format::csv) {
    io::CsvWriter w(path, {"eta_bar", "psi", "eta_z", "eta_l", "log1p_delta", "delta_z", "scaled_gain_pct",
                           "status"});
    for (const auto& c : cells) {
      std::string status = c.ok() ? (c.bound_note ? "outside_bounds" : "ok") : "no_solution";
      w.row({io::fmt17(c.eta_bar), io::fmt17(c.psi), io::fmt17(c.eta_z), io::fmt17(c.eta_l),
             io::fmt17(c.log1p_delta), io::fmt17(c.delta_z), io::fmt17(c.scaled_gain_pct), status});
    }
    return;
  }
  ordered_json j;
  j["inputs"] = inputs;
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) {
    ordered_json e;
    e["eta_bar"] = c.eta_bar;
    e["psi"] = c.psi;
    e["eta_z"] = num(c.eta_z);
    e["eta_l"] = num(c.eta_l);
    e["log1p_delta"] = num(c.log1p_delta);
    e["delta_z"] = num(c.delta_z);
    e["scaled_gain_pct"] = num(c.scaled_gain_pct);
    e["error"] = c.error ? ordered_json(*c.error) : ordered_json(nullptr);
    e["bound_note"] = c.bound_note ? ordered_json(*c.bound_note) : ordered_json(nullptr);
    arr.push_back(e);
  }
  j["cells"] = arr;
  write_json(path, j);
}

ordered_json inputs_json(const calib::CalibrationInputs& in) {
  return {{"beta_z", in.beta_z}, {"beta_l", in.beta_l}, {"bgpt_l", in.bgpt_l}, {"bgpt_z", in.bgpt_z},
          {"ratio_r", in.ratio_r}};
}

const char* ext(Format f) { return f == Format::csv ? ".csv" : ".json"; }

}  // namespace

int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitUsage;
  return kExitData;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ConfigError("format must be csv or json, got '" + s + "'");
}

// simulate ------------------------------------------------------------------

int cmd_simulate(const synth::DgpConfig& config, const fs::path& out_dir, std::ostream& out) {
  config.validate();
  ensure_dir(out_dir);
  auto ld = synth::generate_long_difference(config);
  auto engel = synth::generate_engel_panel(config);
  auto intervals = synth::generate_intervals(config);

  io::write_panel(out_dir / "panel.csv", ld.records);
  io::write_intervals(out_dir / "intervals.csv", intervals);
  io::write_engel_cells(out_dir / "engel_cells.csv", engel.cells);
  {
    io::CsvWriter e(out_dir / "exposure.csv", io::kExposureHeader);
    io::CsvWriter a(out_dir / "adoption.csv", io::kAdoptionHeader);
    io::CsvWriter t(out_dir / "truth_households.csv",
                    {"household_id", "income_bin", "age_bin", "region_id", "cell", "exposure", "coverage", "confound",
                     "adoption_index", "adopted", "first_use_quarter"});
    for (const auto& h : ld.households) {
      auto id = std::to_string(h.household_id);
      e.row({id, io::fmt17(h.exposure), io::fmt17(h.coverage)});
      a.row({id, h.adopted ? "1" : "0", std::to_string(h.first_use_quarter)});
      t.row({id, std::to_string(h.income_bin), std::to_string(h.age_bin), std::to_string(h.region_id),
             std::to_string(h.cell), io::fmt17(h.exposure), io::fmt17(h.coverage), io::fmt17(h.confound),
             io::fmt17(h.adoption_index), h.adopted ? "1" : "0", std::to_string(h.first_use_quarter)});
    }
  }
  {
    io::CsvWriter w(out_dir / "truth_panel.csv",
                    {"household_id", "quarter", "category", "log_counterfactual", "log_noise_free"});
    for (std::size_t i = 0; i < ld.records.size(); ++i) {
      const auto& r = ld.records[i];
      std::fprintf(w.get(), "%lld,%d,%s,%.17g,%.17g\n", static_cast<long long>(r.household_id), r.quarter,
                   std::string(to_string(r.category)).c_str(), ld.log_counterfactual[i], ld.log_noise_free[i]);
    }
  }

  ordered_json truth;
  ordered_json cfg = ordered_json::object();
  for (const auto& [k, v] : config.entries()) cfg[k] = ordered_json::parse(v);
  truth["config"] = cfg;
  ordered_json effects = ordered_json::object();
  for (auto c : kCategories) effects[std::string(to_string(c))] = ld.true_effects[index(c)];
  truth["true_effects"] = effects;
  ordered_json beta = ordered_json::object();
  for (std::size_t a = 0; a < 3; ++a) beta[synth::kEngelActivities[a]] = engel.true_beta[a];
  truth["engel_true_beta"] = beta;
  truth["window_gap"] = {{"productive", config.window_gap_productive}, {"leisure", config.window_gap_leisure}};
  std::size_t adopters = 0;
  for (const auto& h : ld.households) adopters += h.adopted;
  truth["counts"] = {{"households", ld.households.size()},
                     {"adopters", adopters},
                     {"panel_rows", ld.records.size()},
                     {"intervals", intervals.size()},
                     {"engel_cells", engel.cells.size()},
                     {"first_quarter", config.first_quarter()},
                     {"last_quarter", config.last_quarter()}};
  write_json(out_dir / "truth.json", truth);

  out << "households " << ld.households.size() << " (adopters " << adopters << "), quarters "
      << config.first_quarter() << ".." << config.last_quarter() << "\n"
      << "panel rows " << ld.records.size() << ", intervals " << intervals.size() << ", engel cells "
      << engel.cells.size() << "\n"
      << "wrote " << out_dir.string() << "\n";
  return kExitOk;
}

// estimate ------------------------------------------------------------------

int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err) {
  const fs::path& in = opt.in_dir;
  for (const char* f : {"panel.csv", "exposure.csv", "adoption.csv"})
    if (!fs::exists(in / f)) throw DataError("missing input " + (in / f).string());
  ensure_dir(opt.out_dir);

  auto panel = io::read_panel(in / "panel.csv");
  auto hh_rows = io::read_households(in / "exposure.csv", in / "adoption.csv");
  std::map<std::int64_t, econ::HouseholdInputs> households;
  std::unordered_map<std::int64_t, double> exposure;
  for (const auto& [id, h] : hh_rows) {
    households[id] = {h.exposure, h.coverage, h.ever_used};
    exposure[id] = h.exposure;
  }

  ordered_json est;
  est["placebo"] = opt.placebo;
  std::string text;
  const std::vector<int> w{12, 12, 10, 10, 10, 10, 10};

  // long difference
  auto ld = econ::long_difference(panel, households, opt.placebo);
  {
    ordered_json j;
    j["households"] = ld.households;
    j["dropped_zero_exposure"] = ld.dropped_zero_exposure;
    j["dropped_missing_window"] = ld.dropped_missing_window;
    j["pre_quarters"] = ld.pre_quarters;
    j["post_quarters"] = ld.post_quarters;
    ordered_json by = ordered_json::object();
    text += opt.placebo ? "Long difference, placebo windows\n" : "Long difference\n";
    text += row({"category", "2SLS", "(se)", "OLS", "(se)", "F", "N"}, w);
    for (const auto& e : ld.by_category) {
      by[std::string(to_string(e.category))] = {{"iv", regression_json(e.iv, "gpt_use")},
                                                {"ols", regression_json(e.ols, "gpt_use")}};
      text += row({std::string(to_string(e.category)), fmt2(e.iv.coef("gpt_use")), fmt2(e.iv.se("gpt_use")),
                   fmt2(e.ols.coef("gpt_use")), fmt2(e.ols.se("gpt_use")),
                   fmt2(e.iv.first_stage_f.value_or(NAN)), std::to_string(e.iv.n_obs)},
                  w);
    }
    j["by_category"] = by;
    est["long_difference"] = j;
  }

  // event study
  {
    ordered_json j = ordered_json::object();
    io::CsvWriter csv(opt.out_dir / "event_study.csv", {"category", "quarter", "coef", "se", "reference", "missing"});
    text += "\nEvent study (reference quarter 0)\n";
    for (auto c : kCategories) {
      auto frame = econ::event_study_frame(panel, c);
      auto es = econ::event_study(frame, exposure, 0);
      ordered_json path = ordered_json::array();
      std::string line = std::string(to_string(c));
      for (const auto& p : es.path) {
        path.push_back({{"quarter", p.quarter},
                        {"coef", num(p.coef)},
                        {"se", num(p.se)},
                        {"reference", p.reference},
                        {"missing", p.missing}});
        csv.row({std::string(to_string(c)), std::to_string(p.quarter), io::fmt17(p.coef), io::fmt17(p.se),
                 p.reference ? "1" : "0", p.missing ? "1" : "0"});
        line += " " + std::to_string(p.quarter) + ":" + fmt2(p.coef);
      }
      text += line + "\n";
      j[std::string(to_string(c))] = {{"n", es.n_obs},
                                      {"dropped_zero_duration", es.dropped_zero_duration},
                                      {"dropped_no_exposure", es.dropped_no_exposure},
                                      {"path", path}};
    }
    est["event_study"] = j;
  }

  // Engel
  std::optional<econ::EngelEstimates> engel_ll;
  if (fs::exists(in / "engel_cells.csv")) {
    auto cells = io::read_engel_cells(in / "engel_cells.csv");
    std::vector<std::string> acts(synth::kEngelActivities.begin(), synth::kEngelActivities.end());
    engel_ll = econ::engel_loglog(cells, acts, true);
    auto engel_ols = econ::engel_loglog(cells, acts, false);
    auto engel_sh = econ::engel_shares(cells, acts, true);
    ordered_json j;
    j["loglog_iv"] = engel_json(*engel_ll);
    j["loglog_ols"] = engel_json(engel_ols);
    ordered_json sh = engel_json(engel_sh);
    for (std::size_t a = 0; a < acts.size(); ++a) sh[acts[a]]["implied_beta"] = num(engel_sh.implied_beta_from_shares[a]);
    j["shares_iv"] = sh;
    est["engel"] = j;
    text += "\nEngel elasticities\n";
    text += row({"activity", "log-log IV", "(se)", "OLS", "shares IV", "F", "N"}, w);
    for (std::size_t a = 0; a < acts.size(); ++a)
      text += row({acts[a], fmt2(engel_ll->beta[a]), fmt2(engel_ll->beta_se[a]), fmt2(engel_ols.beta[a]),
                   fmt2(engel_sh.implied_beta_from_shares[a]), fmt2(engel_ll->first_stage_f[a].value_or(NAN)),
                   std::to_string(engel_ll->n_obs[a])},
                  w);
  } else {
    err << "warning: " << (in / "engel_cells.csv").string() << " not found, Engel section skipped\n";
  }

  // window contrast
  std::optional<econ::WindowContrast> wc;
  if (fs::exists(in / "intervals.csv")) {
    auto intervals = io::read_intervals(in / "intervals.csv");
    wc = econ::window_contrast(intervals);
    ordered_json j;
    ordered_json shares = ordered_json::object();
    text += "\nGPT-window contrast (percentage points)\n";
    text += row({"category", "GPT", "control", "gap", "", "", ""}, w);
    for (auto c : kCategories) {
      auto k = index(c);
      shares[std::string(to_string(c))] = {
          {"gpt_share", wc->gpt_share[k]}, {"control_share", wc->control_share[k]}, {"difference", wc->difference[k]}};
      text += row({std::string(to_string(c)), fmt2(100 * wc->gpt_share[k]), fmt2(100 * wc->control_share[k]),
                   fmt2(100 * wc->difference[k]), "", "", ""},
                  w);
    }
    j["by_category"] = shares;
    j["cells_used"] = wc->cells_used;
    j["cells_dropped"] = wc->cells_dropped;
    j["gpt_windows"] = wc->gpt_windows;
    j["control_intervals"] = wc->control_intervals;
    est["window_contrast"] = j;
  } else {
    err << "warning: " << (in / "intervals.csv").string() << " not found, window contrast skipped\n";
  }

  // recovery against truth
  if (fs::exists(in / "truth.json")) {
    auto truth = read_json(in / "truth.json");
    ordered_json rec;
    std::string report = "\nRecovery report\n";
    const std::vector<int> rw{26, 10, 10, 10, 10, 8};
    report += row({"quantity", "estimate", "se", "truth", "z", "2 SE"}, rw);
    auto add = [&](const std::string& name, double estv, double se, double tv) {
      double z = (estv - tv) / se;
      bool okv = std::abs(z) <= 2.0;
      rec[name] = {{"estimate", num(estv)}, {"se", num(se)}, {"truth", tv}, {"z", num(z)}, {"within_2se", okv}};
      report += row({name, fmt2(estv), fmt2(se), fmt2(tv), fmt2(z), okv ? "yes" : "NO"}, rw);
    };
    const auto& te = child(truth, "true_effects", "truth.json");
    for (const auto& e : ld.by_category) {
      auto cat = std::string(to_string(e.category));
      double tv = opt.placebo ? 0.0 : get_number(child(te, cat, "truth.json true_effects"), cat);
      add("iv." + cat, e.iv.coef("gpt_use"), e.iv.se("gpt_use"), tv);
      add("ols." + cat, e.ols.coef("gpt_use"), e.ols.se("gpt_use"), tv);
    }
    if (engel_ll) {
      const auto& tb = child(truth, "engel_true_beta", "truth.json");
      for (std::size_t a = 0; a < engel_ll->activities.size(); ++a) {
        const auto& act = engel_ll->activities[a];
        add("engel." + act, engel_ll->beta[a], engel_ll->beta_se[a], get_number(child(tb, act, "truth.json"), act));
      }
    }
    if (wc) {
      const auto& gaps = child(truth, "window_gap", "truth.json");
      for (const char* cat : {"productive", "leisure"}) {
        double tv = get_number(child(gaps, cat, "truth.json window_gap"), cat);
        double got = wc->difference[index(parse_category(cat))];
        bool okv = std::abs(got - tv) <= 0.01;
        rec[std::string("window.") + cat] = {{"estimate", got}, {"truth", tv}, {"within_1pp", okv}};
        report += row({std::string("window.") + cat + " (pp)", fmt2(100 * got), "", fmt2(100 * tv), "",
                       okv ? "yes" : "NO"},
                      rw);
      }
    }
    est["recovery"] = rec;
    text += report;
    out << report;
  } else {
    err << "warning: " << (in / "truth.json").string() << " not found, recovery report skipped\n";
  }

  write_json(opt.out_dir / "estimates.json", est);
  io::write_text(opt.out_dir / "estimates.txt", text);
  if (opt.format == Format::csv) {
    io::CsvWriter w(opt.out_dir / "estimates.csv",
                    {"section", "category", "estimator", "coefficient", "se", "first_stage_f", "n"});
    for (const auto& e : ld.by_category)
      for (auto [name, r] : {std::pair{"iv", &e.iv}, std::pair{"ols", &e.ols}})
        w.row({"long_difference", std::string(to_string(e.category)), name, io::fmt17(r->coef("gpt_use")),
               io::fmt17(r->se("gpt_use")), r->first_stage_f ? io::fmt17(*r->first_stage_f) : "",
               std::to_string(r->n_obs)});
    if (engel_ll)
      for (std::size_t a = 0; a < engel_ll->activities.size(); ++a)
        w.row({"engel", engel_ll->activities[a], "loglog_iv", io::fmt17(engel_ll->beta[a]),
               io::fmt17(engel_ll->beta_se[a]),
               engel_ll->first_stage_f[a] ? io::fmt17(*engel_ll->first_stage_f[a]) : "",
               std::to_string(engel_ll->n_obs[a])});
    if (wc)
      for (auto c : kCategories)
        w.row({"window_contrast", std::string(to_string(c)), "difference", io::fmt17(wc->difference[index(c)]), "",
               "", std::to_string(wc->gpt_windows)});
  }
  out << "wrote " << (opt.out_dir / "estimates.json").string() << "\n";
  return kExitOk;
}

// calibrate -----------------------------------------------------------------

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err) {
  fs::path path = fs::is_directory(opt.estimates) ? opt.estimates / "estimates.json" : opt.estimates;
  auto est = read_json(path);
  const auto& ld = child(child(est, "long_difference", path.string()), "by_category", "long_difference");
  const auto& engel = child(child(est, "engel", path.string()), "loglog_iv", "engel");

  calib::CalibrationInputs in;
  in.beta_z = get_number(child(child(engel, "productive", "engel"), "beta", "engel.productive"), "beta_z");
  in.beta_l = get_number(child(child(engel, "leisure", "engel"), "beta", "engel.leisure"), "beta_l");
  auto iv_coef = [&](const char* cat) {
    return get_number(child(child(child(ld, cat, "long_difference"), "iv", cat), "coefficient", cat),
                      std::string(cat) + " coefficient");
  };
  in.bgpt_l = iv_coef("leisure");
  in.bgpt_z = iv_coef("productive");
  in = in.strict();
  if (est.value("placebo", false)) err << "warning: calibrating from placebo estimates\n";

  ensure_dir(opt.out_dir);
  auto cells = calib::grid(in, opt.eta_bars, opt.psis);
  auto table = calib::format_table(cells, opt.eta_bars, opt.psis);
  write_grid(cells, opt.out_dir / (std::string("calibration") + ext(opt.format)), opt.format, inputs_json(in));
  io::write_text(opt.out_dir / "calibration.txt", table);
  char buf[200];
  std::snprintf(buf, sizeof buf, "inputs: beta_z %.4f, beta_l %.4f, r %.4f, bgpt_l %.4f, bgpt_z %.4f\n", in.beta_z,
                in.beta_l, in.ratio_r, in.bgpt_l, in.bgpt_z);
  out << buf << table;
  for (const auto& c : cells)
    if (!c.ok()) err << "eta_bar " << c.eta_bar << ", psi " << c.psi << ": " << *c.error << "\n";
  return kExitOk;
}

// reproduce-table8 ----------------------------------------------------------

int cmd_reproduce_table8(const Table8Options& opt, std::ostream& out, std::ostream& err) {
  auto in = opt.strict_ratio ? opt.inputs.strict() : opt.inputs;
  in.validate();
  auto cells = calib::grid(in, opt.eta_bars, opt.psis);
  auto table = calib::format_table(cells, opt.eta_bars, opt.psis);
  out << table;
  if (!opt.out_dir.empty()) {
    ensure_dir(opt.out_dir);
    write_grid(cells, opt.out_dir / (std::string("table8") + ext(opt.format)), opt.format, inputs_json(in));
    io::write_text(opt.out_dir / "table8.txt", table);
  }
  std::size_t failed = 0, mismatched = 0, checked = 0;
  for (const auto& c : cells) {
    if (!c.ok()) {
      ++failed;
      err << "eta_bar " << c.eta_bar << ", psi " << c.psi << ": " << *c.error << "\n";
      continue;
    }
    if (c.bound_note) err << "note: eta_bar " << c.eta_bar << ", psi " << c.psi << ": " << *c.bound_note << "\n";
    if (opt.inputs_overridden) continue;
    if (auto g = golden_for(c.eta_bar, c.psi)) {
      ++checked;
      if (std::abs(c.scaled_gain_pct - *g) > calib::kTable8Tolerance) {
        ++mismatched;
        char buf[160];
        std::snprintf(buf, sizeof buf, "mismatch at eta_bar %.2f, psi %.2f: expected %.2f, got %.4f\n", c.eta_bar,
                      c.psi, *g, c.scaled_gain_pct);
        err << buf;
      }
    }
  }
  if (opt.inputs_overridden) {
    out << "golden check skipped (inputs overridden)\n";
    return kExitOk;
  }
  out << "golden check: " << checked - mismatched << "/" << checked << " cells within "
      << calib::kTable8Tolerance << "pp";
  if (failed) out << ", " << failed << " cells without a solution";
  out << "\n";
  return (failed || mismatched) ? kExitVerification : kExitOk;
}

// exposure and weather ------------------------------------------------------

int cmd_exposure(const fs::path& labels_path, const fs::path& shares_path, const fs::path& out_file, Format format,
                 std::ostream& out, std::ostream& err) {
  auto labels = io::read_labels(labels_path);
  auto shares = io::read_shares(shares_path);
  if (shares.empty()) err << "warning: " << shares_path.string() << " has no rows\n";
  auto rows = exposure::household_exposure(shares, labels);
  if (format == Format::csv) {
    io::CsvWriter w(out_file, io::kExposureHeader);
    for (const auto& r : rows) w.row({std::to_string(r.household_id), io::fmt17(r.exposure), io::fmt17(r.coverage)});
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& r : rows)
      arr.push_back({{"household_id", r.household_id}, {"exposure", r.exposure}, {"coverage", r.coverage}});
    write_json(out_file, arr);
  }
  out << rows.size() << " households, " << labels.size() << " labeled domains\n";
  return kExitOk;
}

int cmd_weather(const fs::path& weather_path, const fs::path& crosswalk_path, const fs::path& out_file, Format format,
                std::ostream& out, std::ostream& err) {
  auto grid = io::read_weather(weather_path);
  auto crosswalk = io::read_crosswalk(crosswalk_path);
  if (grid.empty()) err << "warning: " << weather_path.string() << " has no rows\n";
  auto agg = exposure::aggregate_weather(grid, crosswalk);
  if (!agg.unmapped.empty()) {
    err << "warning: " << agg.unmapped.size() << " counties without a region:";
    for (const auto& c : agg.unmapped) err << " " << c;
    err << "\n";
  }
  if (format == Format::csv) {
    io::CsvWriter w(out_file, {"region_id", "month", "mean_prec", "counties"});
    for (const auto& r : agg.rows)
      w.row({std::to_string(r.region_id), r.month, io::fmt17(r.mean_prec), std::to_string(r.counties)});
  } else {
    ordered_json arr = ordered_json::array();
    for (const auto& r : agg.rows)
      arr.push_back(
          {{"region_id", r.region_id}, {"month", r.month}, {"mean_prec", r.mean_prec}, {"counties", r.counties}});
    write_json(out_file, arr);
  }
  out << agg.rows.size() << " region-months\n";
  return kExitOk;
}

}  // namespace digitime::pipeline
