#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "olapsim/random.hpp"

namespace olapsim {

struct Constant {
    double value = 0.0;
    bool operator==(const Constant&) const = default;
};

/// Half-open [lo, hi).
struct Uniform {
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const Uniform&) const = default;
};

struct Exponential {
    double mean = 1.0;
    bool operator==(const Exponential&) const = default;
};

/// Integer uniform on the closed range {lo, ..., hi}.
struct UniformInt {
    long lo = 0;
    long hi = 0;
    bool operator==(const UniformInt&) const = default;
};

using DistributionSpec = std::variant<Constant, Uniform, Exponential, UniformInt>;

/// Empty string when valid, otherwise the violated constraint.
[[nodiscard]] std::string check(const DistributionSpec& dist);

[[nodiscard]] double mean(const DistributionSpec& dist);

/// Constant returns exactly its value; Uniform lands in [lo, hi);
/// Exponential in (0, inf). Parameters are assumed already validated.
double sample(const DistributionSpec& dist, RandomStream& stream);

/// Canonical text form, e.g. "uniform(50, 55)". Round-trips through parse_distribution.
[[nodiscard]] std::string to_string(const DistributionSpec& dist);

/// Parses "constant(c)", "uniform(lo, hi)", "exponential(mean)",
/// "uniform_int(lo, hi)" or a bare number (taken as constant).
/// Throws std::invalid_argument on malformed text.
[[nodiscard]] DistributionSpec parse_distribution(std::string_view text);

}  // namespace olapsim
