#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace olapsim {

/// Scenario text could not be tokenized or parsed. Carries the 1-based line.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A parsed value violates a constraint. Carries the "section.key" field name.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A run-time accounting or ordering invariant was broken.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NoRoute : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ShapeMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NoEligibleServer : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A statistic has no defined value (e.g. a CV with zero mean).
class MetricUndefined : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A queueing formula was asked for a load at or above saturation.
class Unstable : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace olapsim
