#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace digitime {

/// Column store for estimation inputs. Categorical keys are stored as
/// integer-valued double columns and combined into dense ids on demand.
class Frame {
 public:
  Frame() = default;
  explicit Frame(std::size_t rows) : rows_(rows) {}

  std::size_t rows() const { return rows_; }
  bool has(const std::string& name) const { return columns_.count(name) != 0; }
  void add(const std::string& name, std::vector<double> values);
  const std::vector<double>& col(const std::string& name) const;
  std::vector<double>& col(const std::string& name);
  std::vector<std::string> names() const;

  /// Rows where keep[i] is true, all columns.
  Frame filter(const std::vector<bool>& keep) const;

 private:
  std::size_t rows_ = 0;
  std::map<std::string, std::vector<double>> columns_;
};

struct DenseKey {
  std::vector<std::int64_t> ids;
  std::size_t n_levels = 0;
};

/// Interacts the listed columns into one dense categorical id. Levels are
/// numbered in lexicographic order of the key tuples, so the result does not
/// depend on row order.
DenseKey composite_key(const Frame& frame, const std::vector<std::string>& columns);

}  // namespace digitime
