#include "digitime/frame.hpp"

#include <algorithm>

#include "digitime/errors.hpp"

namespace digitime {

void Frame::add(const std::string& name, std::vector<double> values) {
  if (columns_.empty() && rows_ == 0) rows_ = values.size();
  if (values.size() != rows_)
    throw DataError("column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                    std::to_string(rows_));
  columns_[name] = std::move(values);
}

const std::vector<double>& Frame::col(const std::string& name) const {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw DataError("missing column '" + name + "'");
  return it->second;
}

std::vector<double>& Frame::col(const std::string& name) {
  auto it = columns_.find(name);
  if (it == columns_.end()) throw DataError("missing column '" + name + "'");
  return it->second;
}

std::vector<std::string> Frame::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : columns_) out.push_back(k);
  return out;
}

Frame Frame::filter(const std::vector<bool>& keep) const {
  if (keep.size() != rows_) throw DataError("filter mask size mismatch");
  std::size_t n = static_cast<std::size_t>(std::count(keep.begin(), keep.end(), true));
  Frame out(n);
  for (const auto& [name, values] : columns_) {
    std::vector<double> v;
    v.reserve(n);
    for (std::size_t i = 0; i < rows_; ++i)
      if (keep[i]) v.push_back(values[i]);
    out.columns_[name] = std::move(v);
  }
  return out;
}

DenseKey composite_key(const Frame& frame, const std::vector<std::string>& columns) {
  DenseKey key;
  const std::size_t n = frame.rows();
  key.ids.assign(n, 0);
  if (columns.empty()) {
    key.n_levels = n > 0 ? 1 : 0;
    return key;
  }
  std::vector<const std::vector<double>*> cols;
  for (const auto& c : columns) cols.push_back(&frame.col(c));

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto less = [&](std::size_t a, std::size_t b) {
    for (const auto* c : cols) {
      if ((*c)[a] != (*c)[b]) return (*c)[a] < (*c)[b];
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), less);
  std::int64_t level = -1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == 0 || less(order[k - 1], order[k])) ++level;
    key.ids[order[k]] = level;
  }
  key.n_levels = static_cast<std::size_t>(level + 1);
  return key;
}

}  // namespace digitime
