#include "digitime/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "digitime/errors.hpp"

namespace digitime::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n"), e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::string where(const std::string& file, const CsvRow& row, const std::string& col) {
  return file + " line " + std::to_string(row.line) + ", column '" + col + "'";
}

}  // namespace

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<CsvRow> read_csv(const fs::path& path, const std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file, expected header " + join(header));
  auto got = split(trim(line));
  if (got != header) {
    for (std::size_t i = 0; i < std::max(got.size(), header.size()); ++i) {
      std::string g = i < got.size() ? got[i] : "<missing>", h = i < header.size() ? header[i] : "<none>";
      if (g != h)
        throw DataError(path.string() + ": header column " + std::to_string(i + 1) + " is '" + g + "', expected '" +
                        h + "' (expected header " + join(header) + ")");
    }
  }
  std::vector<CsvRow> rows;
  std::size_t n = 1;
  while (std::getline(in, line)) {
    ++n;
    if (trim(line).empty()) continue;
    CsvRow r{n, split(trim(line))};
    if (r.fields.size() != header.size())
      throw DataError(path.string() + " line " + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(r.fields.size()));
    rows.push_back(std::move(r));
  }
  return rows;
}

double parse_double(const CsvRow& row, std::size_t col, const std::string& file, const std::string& name) {
  const std::string& s = row.fields[col];
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw DataError(where(file, row, name) + ": '" + s + "' is not a finite number");
  return v;
}

long long parse_int(const CsvRow& row, std::size_t col, const std::string& file, const std::string& name) {
  const std::string& s = row.fields[col];
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw DataError(where(file, row, name) + ": '" + s + "' is not an integer");
  return v;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& header) {
  f_ = std::fopen(path.string().c_str(), "wb");
  if (!f_) throw DataError("cannot write " + path.string());
  row(header);
}

CsvWriter::~CsvWriter() {
  if (f_) std::fclose(f_);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  std::fputs(join(fields).c_str(), f_);
  std::fputc('\n', f_);
}

void write_panel(const fs::path& path, const std::vector<PanelRecord>& records) {
  CsvWriter w(path, kPanelHeader);
  for (const auto& r : records)
    std::fprintf(w.get(), "%lld,%d,%d,%d,%d,%s,%.17g,%.17g\n", static_cast<long long>(r.household_id), r.quarter,
                 r.income_bin, r.age_bin, r.region_id, std::string(to_string(r.category)).c_str(), r.duration_seconds,
                 r.weight);
}

std::vector<PanelRecord> read_panel(const fs::path& path) {
  const std::string file = path.filename().string();
  std::vector<PanelRecord> out;
  for (const auto& row : read_csv(path, kPanelHeader)) {
    PanelRecord r;
    r.household_id = parse_int(row, 0, file, "household_id");
    r.quarter = static_cast<int>(parse_int(row, 1, file, "quarter"));
    r.income_bin = static_cast<int>(parse_int(row, 2, file, "income_bin"));
    r.age_bin = static_cast<int>(parse_int(row, 3, file, "age_bin"));
    r.region_id = static_cast<int>(parse_int(row, 4, file, "region_id"));
    try {
      r.category = parse_category(row.fields[5]);
    } catch (const DataError& e) {
      throw DataError(where(file, row, "category") + ": " + e.what());
    }
    r.duration_seconds = parse_double(row, 6, file, "duration_seconds");
    r.weight = parse_double(row, 7, file, "weight");
    if (r.income_bin < 1 || r.income_bin > 8) throw DataError(where(file, row, "income_bin") + ": must be 1..8");
    if (r.age_bin < 1 || r.age_bin > 6) throw DataError(where(file, row, "age_bin") + ": must be 1..6");
    if (r.duration_seconds < 0.0) throw DataError(where(file, row, "duration_seconds") + ": negative");
    if (!(r.weight > 0.0)) throw DataError(where(file, row, "weight") + ": must be positive");
    out.push_back(r);
  }
  return out;
}

void write_intervals(const fs::path& path, const std::vector<IntervalRecord>& records) {
  CsvWriter w(path, kIntervalHeader);
  for (const auto& r : records)
    std::fprintf(w.get(), "%lld,%d,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(r.household_id),
                 r.day_of_week, r.hour_bucket, r.income_bin, r.age_bin, r.is_gpt_window ? 1 : 0, r.duration[0],
                 r.duration[1], r.duration[2], r.duration[3]);
}

std::vector<IntervalRecord> read_intervals(const fs::path& path) {
  const std::string file = path.filename().string();
  std::vector<IntervalRecord> out;
  for (const auto& row : read_csv(path, kIntervalHeader)) {
    IntervalRecord r;
    r.household_id = parse_int(row, 0, file, "household_id");
    r.day_of_week = static_cast<int>(parse_int(row, 1, file, "day_of_week"));
    r.hour_bucket = static_cast<int>(parse_int(row, 2, file, "hour_bucket"));
    r.income_bin = static_cast<int>(parse_int(row, 3, file, "income_bin"));
    r.age_bin = static_cast<int>(parse_int(row, 4, file, "age_bin"));
    auto gpt = parse_int(row, 5, file, "is_gpt_window");
    if (gpt != 0 && gpt != 1) throw DataError(where(file, row, "is_gpt_window") + ": must be 0 or 1");
    r.is_gpt_window = gpt == 1;
    for (std::size_t k = 0; k < 4; ++k) {
      r.duration[k] = parse_double(row, 6 + k, file, kIntervalHeader[6 + k]);
      if (r.duration[k] < 0.0) throw DataError(where(file, row, kIntervalHeader[6 + k]) + ": negative");
    }
    if (r.day_of_week < 0 || r.day_of_week > 6) throw DataError(where(file, row, "day_of_week") + ": must be 0..6");
    if (r.hour_bucket < 0 || r.hour_bucket > 47) throw DataError(where(file, row, "hour_bucket") + ": must be 0..47");
    out.push_back(r);
  }
  return out;
}

void write_engel_cells(const fs::path& path, const std::vector<synth::EngelCell>& cells) {
  CsvWriter w(path, kEngelHeader);
  for (const auto& c : cells)
    std::fprintf(w.get(), "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.cell_id, c.quarter, c.total, c.log_precip,
                 c.hours[0], c.hours[1], c.hours[2]);
}

Frame read_engel_cells(const fs::path& path) {
  const std::string file = path.filename().string();
  auto rows = read_csv(path, kEngelHeader);
  std::vector<std::vector<double>> cols(kEngelHeader.size());
  for (const auto& row : rows)
    for (std::size_t j = 0; j < kEngelHeader.size(); ++j) {
      double v = parse_double(row, j, file, kEngelHeader[j]);
      if (j >= 4 && v < 0.0) throw DataError(where(file, row, kEngelHeader[j]) + ": negative hours");
      if (j == 2 && !(v > 0.0)) throw DataError(where(file, row, "total") + ": must be positive");
      cols[j].push_back(v);
    }
  Frame f(rows.size());
  for (std::size_t j = 0; j < kEngelHeader.size(); ++j) f.add(kEngelHeader[j], std::move(cols[j]));
  return f;
}

std::map<std::int64_t, HouseholdRow> read_households(const fs::path& exposure_csv, const fs::path& adoption_csv) {
  std::map<std::int64_t, HouseholdRow> out;
  const std::string ef = exposure_csv.filename().string(), af = adoption_csv.filename().string();
  for (const auto& row : read_csv(exposure_csv, kExposureHeader)) {
    auto id = parse_int(row, 0, ef, "household_id");
    auto& h = out[id];
    h.exposure = parse_double(row, 1, ef, "exposure");
    h.coverage = parse_double(row, 2, ef, "coverage");
    if (h.exposure < 0.0 || h.exposure > 1.0) throw DataError(where(ef, row, "exposure") + ": outside [0,1]");
  }
  for (const auto& row : read_csv(adoption_csv, kAdoptionHeader)) {
    auto id = parse_int(row, 0, af, "household_id");
    auto it = out.find(id);
    if (it == out.end()) throw DataError(where(af, row, "household_id") + ": household missing from " + ef);
    auto used = parse_int(row, 1, af, "ever_used");
    if (used != 0 && used != 1) throw DataError(where(af, row, "ever_used") + ": must be 0 or 1");
    it->second.ever_used = used == 1;
    it->second.first_use_quarter = static_cast<int>(parse_int(row, 2, af, "first_use_quarter"));
  }
  return out;
}

exposure::LabelSet read_labels(const fs::path& path) {
  const std::string file = path.filename().string();
  exposure::LabelSet labels;
  for (const auto& row : read_csv(path, kLabelHeader)) {
    try {
      labels.add({row.fields[0], parse_category(row.fields[1]),
                  static_cast<int>(parse_int(row, 2, file, "exposure_count"))});
    } catch (const DataError& e) {
      throw DataError(file + " line " + std::to_string(row.line) + ": " + e.what());
    }
  }
  return labels;
}

std::vector<exposure::BrowseShare> read_shares(const fs::path& path) {
  const std::string file = path.filename().string();
  std::vector<exposure::BrowseShare> out;
  for (const auto& row : read_csv(path, kShareHeader)) {
    exposure::BrowseShare s{parse_int(row, 0, file, "household"), row.fields[1], parse_double(row, 2, file, "share")};
    if (s.share < 0.0 || s.share > 1.0) throw DataError(where(file, row, "share") + ": outside [0,1]");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<exposure::WeatherGridRecord> read_weather(const fs::path& path) {
  const std::string file = path.filename().string();
  std::vector<exposure::WeatherGridRecord> out;
  for (const auto& row : read_csv(path, kWeatherHeader)) {
    exposure::WeatherGridRecord r{row.fields[0], row.fields[1], row.fields[2], parse_double(row, 3, file, "prec")};
    if (r.prec < 0.0) throw DataError(where(file, row, "prec") + ": negative precipitation");
    out.push_back(std::move(r));
  }
  return out;
}

std::map<std::string, int> read_crosswalk(const fs::path& path) {
  const std::string file = path.filename().string();
  std::map<std::string, int> out;
  for (const auto& row : read_csv(path, kCrosswalkHeader)) {
    int region = static_cast<int>(parse_int(row, 1, file, "region_id"));
    auto [it, fresh] = out.emplace(row.fields[0], region);
    if (!fresh && it->second != region)
      throw DataError(where(file, row, "county_fips") + ": county mapped to two regions");
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + " line " + std::to_string(n) + ": expected key=value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

}  // namespace digitime::io
