#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace digitime {

/// Website purpose classes; `mixed` maps to the model's `other` activity.
enum class Category { productive = 0, leisure = 1, mixed = 2, adcdn = 3 };

inline constexpr std::array<Category, 4> kCategories{Category::productive, Category::leisure,
                                                     Category::mixed, Category::adcdn};

std::string_view to_string(Category c);
Category parse_category(std::string_view s);
inline std::size_t index(Category c) { return static_cast<std::size_t>(c); }

/// One household x quarter x category observation.
struct PanelRecord {
  std::int64_t household_id = 0;
  int quarter = 0;  // offset from the release quarter
  int income_bin = 1;
  int age_bin = 1;
  int region_id = 1;
  Category category = Category::productive;
  double duration_seconds = 0.0;
  double weight = 1.0;
};

/// One 30-minute browsing interval.
struct IntervalRecord {
  std::int64_t household_id = 0;
  int day_of_week = 0;   // 0..6
  int hour_bucket = 0;   // 0..47
  int income_bin = 1;
  int age_bin = 1;
  bool is_gpt_window = false;
  std::array<double, 4> duration{};  // seconds, indexed by Category
};

}  // namespace digitime
