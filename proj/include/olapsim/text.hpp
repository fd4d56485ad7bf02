#pragma once

#include <string>
#include <string_view>

namespace olapsim {

/// Shortest round-trip decimal form of `value` (locale independent).
[[nodiscard]] std::string format_number(double value);

[[nodiscard]] std::string_view trim(std::string_view text) noexcept;

}  // namespace olapsim
