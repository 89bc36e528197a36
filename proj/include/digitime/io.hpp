#pragma once

// CSV and config-file plumbing. Machine formats print doubles with 17
// significant digits; every reader checks the exact header and reports the
// 1-based line number of a bad row.

#include <cstdio>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "digitime/exposure.hpp"
#include "digitime/frame.hpp"
#include "digitime/records.hpp"
#include "digitime/synthpanel.hpp"

namespace digitime::io {

namespace fs = std::filesystem;

std::string fmt17(double v);

inline const std::vector<std::string> kPanelHeader{"household_id", "quarter", "income_bin", "age_bin",
                                                   "region_id", "category", "duration_seconds", "weight"};
inline const std::vector<std::string> kIntervalHeader{
    "household_id", "day_of_week", "hour_bucket", "income_bin", "age_bin", "is_gpt_window",
    "productive_seconds", "leisure_seconds", "mixed_seconds", "adcdn_seconds"};
inline const std::vector<std::string> kEngelHeader{"cell_id", "quarter", "total", "log_precip",
                                                   "leisure", "productive", "other"};
inline const std::vector<std::string> kExposureHeader{"household_id", "exposure", "coverage"};
inline const std::vector<std::string> kAdoptionHeader{"household_id", "ever_used", "first_use_quarter"};
inline const std::vector<std::string> kLabelHeader{"domain", "purpose", "exposure_count"};
inline const std::vector<std::string> kShareHeader{"household", "domain", "share"};
inline const std::vector<std::string> kWeatherHeader{"grid_cell", "county_fips", "date", "prec"};
inline const std::vector<std::string> kCrosswalkHeader{"county_fips", "region_id"};

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

/// Reads a comma-separated file whose first line must equal `header`.
std::vector<CsvRow> read_csv(const fs::path& path, const std::vector<std::string>& header);

// Field parsers; errors name the file, line and column.
double parse_double(const CsvRow& row, std::size_t col, const std::string& file, const std::string& name);
long long parse_int(const CsvRow& row, std::size_t col, const std::string& file, const std::string& name);

/// RAII FILE* writer; throws DataError when the file cannot be opened.
class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;
  FILE* get() { return f_; }
  void row(const std::vector<std::string>& fields);

 private:
  FILE* f_ = nullptr;
};

void write_panel(const fs::path& path, const std::vector<PanelRecord>& records);
std::vector<PanelRecord> read_panel(const fs::path& path);

void write_intervals(const fs::path& path, const std::vector<IntervalRecord>& records);
std::vector<IntervalRecord> read_intervals(const fs::path& path);

void write_engel_cells(const fs::path& path, const std::vector<synth::EngelCell>& cells);
/// Frame with the header's columns.
Frame read_engel_cells(const fs::path& path);

struct HouseholdRow {
  double exposure = 0.0, coverage = 0.0;
  bool ever_used = false;
  int first_use_quarter = 0;
};
std::map<std::int64_t, HouseholdRow> read_households(const fs::path& exposure_csv, const fs::path& adoption_csv);

exposure::LabelSet read_labels(const fs::path& path);
std::vector<exposure::BrowseShare> read_shares(const fs::path& path);
std::vector<exposure::WeatherGridRecord> read_weather(const fs::path& path);
std::map<std::string, int> read_crosswalk(const fs::path& path);

/// key=value lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path);

void write_text(const fs::path& path, const std::string& text);

}  // namespace digitime::io
