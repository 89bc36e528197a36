#include <CLI11.hpp>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "digitime/errors.hpp"
#include "digitime/io.hpp"
#include "digitime/pipeline.hpp"

namespace pl = digitime::pipeline;
using digitime::synth::DgpConfig;

int main(int argc, char** argv) {
  CLI::App app{"digitime: household digital time allocation, estimation and calibration"};
  app.require_subcommand(1);
  std::string format = "";

  // simulate
  auto* sim = app.add_subcommand("simulate", "generate a synthetic panel with known truth");
  std::string sim_config, sim_out = "out";
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("--config", sim_config, "key=value DGP config file")->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "output directory");
  sim->add_option("--seed", sim_seed, "RNG seed");
  std::map<std::string, std::string> field_values;
  for (const auto& [key, value] : DgpConfig{}.entries()) {
    if (key == "seed") continue;
    sim->add_option("--" + key, field_values[key], "DGP field (default " + value + ")");
  }

  // estimate
  auto* est = app.add_subcommand("estimate", "run the estimators on a simulated or supplied panel");
  pl::EstimateOptions est_opt;
  std::string est_in = "out", est_out;
  est->add_option("--in", est_in, "directory with panel.csv, exposure.csv, adoption.csv, ...");
  est->add_option("--out", est_out, "output directory (default: --in)");
  est->add_flag("--placebo", est_opt.placebo, "pre-period placebo windows");
  est->add_option("--format", format, "csv adds estimates.csv")->check(CLI::IsMember({"csv", "json"}));

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "calibration grid from estimates.json");
  pl::CalibrateOptions cal_opt;
  std::string cal_in = "out", cal_out;
  cal->add_option("--in", cal_in, "estimates.json or its directory");
  cal->add_option("--out", cal_out, "output directory (default: directory of --in)");
  cal->add_option("--eta-bar,--eta_bar", cal_opt.eta_bars, "mean curvature values")->delimiter(',');
  cal->add_option("--psi", cal_opt.psis, "efficiency ratio values")->delimiter(',');
  cal->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  // reproduce-table8
  auto* t8 = app.add_subcommand("reproduce-table8", "published calibration grid with golden check");
  pl::Table8Options t8_opt;
  std::string t8_out;
  auto* o1 = t8->add_option("--beta-z,--beta_z", t8_opt.inputs.beta_z, "productive Engel elasticity");
  auto* o2 = t8->add_option("--beta-l,--beta_l", t8_opt.inputs.beta_l, "leisure Engel elasticity");
  auto* o3 = t8->add_option("--bgpt-l,--bgpt_l", t8_opt.inputs.bgpt_l, "causal effect on leisure");
  auto* o4 = t8->add_option("--bgpt-z,--bgpt_z", t8_opt.inputs.bgpt_z, "causal effect on productive");
  auto* o5 = t8->add_option("--ratio-r,--ratio_r", t8_opt.inputs.ratio_r, "beta_z / beta_l");
  t8->add_option("--eta-bar,--eta_bar", t8_opt.eta_bars, "mean curvature values")->delimiter(',');
  t8->add_option("--psi", t8_opt.psis, "efficiency ratio values")->delimiter(',');
  t8->add_flag("--strict-ratio,--strict_ratio", t8_opt.strict_ratio, "recompute r as beta_z / beta_l");
  t8->add_option("--out", t8_out, "write table8.{csv,json} and table8.txt here");
  t8->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  // exposure
  auto* ex = app.add_subcommand("exposure", "household exposure from browsing shares");
  std::string ex_labels, ex_shares, ex_out = "household_exposure.csv";
  ex->add_option("--labels", ex_labels, "domain,purpose,exposure_count")->required()->check(CLI::ExistingFile);
  ex->add_option("--shares", ex_shares, "household,domain,share")->required()->check(CLI::ExistingFile);
  ex->add_option("--out", ex_out, "output file");
  ex->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  // weather
  auto* we = app.add_subcommand("weather", "region-month precipitation from grid records");
  std::string we_grid, we_xwalk, we_out = "region_precip.csv";
  we->add_option("--weather", we_grid, "grid_cell,county_fips,date,prec")->required()->check(CLI::ExistingFile);
  we->add_option("--crosswalk", we_xwalk, "county_fips,region_id")->required()->check(CLI::ExistingFile);
  we->add_option("--out", we_out, "output file");
  we->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : pl::kExitUsage;
  }

  try {
    if (*sim) {
      DgpConfig config;
      if (!sim_config.empty())
        for (const auto& [k, v] : digitime::io::read_config(sim_config)) config.set(k, v);
      if (sim_seed) config.set("seed", std::to_string(*sim_seed));
      for (const auto& [key, value] : DgpConfig{}.entries())
        if (key != "seed" && sim->count("--" + key)) config.set(key, field_values[key]);
      return pl::cmd_simulate(config, sim_out, std::cout);
    }
    if (*est) {
      est_opt.in_dir = est_in;
      est_opt.out_dir = est_out.empty() ? est_in : est_out;
      est_opt.format = pl::parse_format(format.empty() ? "json" : format);
      return pl::cmd_estimate(est_opt, std::cout, std::cerr);
    }
    if (*cal) {
      cal_opt.estimates = cal_in;
      if (!cal_out.empty())
        cal_opt.out_dir = cal_out;
      else
        cal_opt.out_dir = std::filesystem::is_directory(cal_in) ? std::filesystem::path(cal_in)
                                                                : std::filesystem::path(cal_in).parent_path();
      if (cal_opt.out_dir.empty()) cal_opt.out_dir = ".";
      cal_opt.format = pl::parse_format(format.empty() ? "json" : format);
      return pl::cmd_calibrate(cal_opt, std::cout, std::cerr);
    }
    if (*t8) {
      for (auto* o : {o1, o2, o3, o4, o5})
        if (o->count()) t8_opt.inputs_overridden = true;
      t8_opt.out_dir = t8_out;
      t8_opt.format = pl::parse_format(format.empty() ? "csv" : format);
      return pl::cmd_reproduce_table8(t8_opt, std::cout, std::cerr);
    }
    if (*ex) return pl::cmd_exposure(ex_labels, ex_shares, ex_out, pl::parse_format(format.empty() ? "csv" : format),
                                     std::cout, std::cerr);
    if (*we) return pl::cmd_weather(we_grid, we_xwalk, we_out, pl::parse_format(format.empty() ? "csv" : format),
                                    std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pl::exit_code(e);
  }
  return pl::kExitUsage;
}
