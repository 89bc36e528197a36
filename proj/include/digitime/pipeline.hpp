#pragma once

// The command implementations behind the digitime binary. Each returns the
// process exit code; errors propagate as exceptions and exit_code() maps them.

#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "digitime/calibration.hpp"
#include "digitime/synthpanel.hpp"

namespace digitime::pipeline {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitVerification = 3;

/// 1 for configuration and domain errors, 2 for everything data related.
int exit_code(const std::exception& e);

enum class Format { csv, json };
Format parse_format(const std::string& s);

/// Writes panel.csv, intervals.csv, engel_cells.csv, exposure.csv,
/// adoption.csv, truth.json, truth_households.csv and truth_panel.csv.
int cmd_simulate(const synth::DgpConfig& config, const fs::path& out_dir, std::ostream& out);

struct EstimateOptions {
  fs::path in_dir;
  fs::path out_dir;
  bool placebo = false;
  Format format = Format::json;
};

/// Long difference, event study, Engel (both forms) and window contrast.
/// estimates.json is always written since calibrate reads it.
int cmd_estimate(const EstimateOptions& opt, std::ostream& out, std::ostream& err);

struct CalibrateOptions {
  fs::path estimates;  // estimates.json or the directory holding it
  fs::path out_dir;
  std::vector<double> eta_bars = calib::kTable8EtaBars;
  std::vector<double> psis = calib::kTable8Psis;
  Format format = Format::json;
};

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err);

struct Table8Options {
  calib::CalibrationInputs inputs;
  bool inputs_overridden = false;  // golden check is skipped
  bool strict_ratio = false;
  std::vector<double> eta_bars = calib::kTable8EtaBars;
  std::vector<double> psis = calib::kTable8Psis;
  fs::path out_dir;  // empty: print only
  Format format = Format::csv;
};

/// Exit 3 in golden mode when a cell fails or misses the published value.
int cmd_reproduce_table8(const Table8Options& opt, std::ostream& out, std::ostream& err);

int cmd_exposure(const fs::path& labels, const fs::path& shares, const fs::path& out_file, Format format,
                 std::ostream& out, std::ostream& err);

int cmd_weather(const fs::path& weather, const fs::path& crosswalk, const fs::path& out_file, Format format,
                std::ostream& out, std::ostream& err);

}  // namespace digitime::pipeline
