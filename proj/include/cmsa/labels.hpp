#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cmsa {

// Class ids follow the task's table order.
enum class Polarity : int { kPositive = 0, kNegative = 1, kNeutral = 2 };

inline constexpr int kNumPolarities = 3;
inline constexpr std::array<std::string_view, kNumPolarities> kPolarityNames = {
    "positive", "negative", "neutral"};

inline std::string_view polarity_name(int id) { return kPolarityNames.at(id); }

inline std::optional<int> parse_polarity(std::string_view name) {
  for (int i = 0; i < kNumPolarities; ++i) {
    if (kPolarityNames[i] == name) return i;
  }
  return std::nullopt;
}

}  // namespace cmsa
