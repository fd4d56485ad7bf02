#include "olapsim/distribution.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "olapsim/text.hpp"

namespace olapsim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

double to_double(std::string_view text) {
    text = trim(text);
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    return v;
}

long to_long(std::string_view text) {
    const double v = to_double(text);
    if (v != std::floor(v)) throw std::invalid_argument("not an integer: '" + std::string(trim(text)) + "'");
    return static_cast<long>(v);
}

}  // namespace

std::string check(const DistributionSpec& dist) {
    return std::visit(
        Overloaded{
            [](const Constant& d) -> std::string {
                return std::isfinite(d.value) && d.value >= 0.0 ? "" : "constant value must be >= 0";
            },
            [](const Uniform& d) -> std::string {
                return std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo <= d.hi ? ""
                                                                                  : "uniform requires lo <= hi";
            },
            [](const Exponential& d) -> std::string {
                return std::isfinite(d.mean) && d.mean > 0.0 ? "" : "exponential mean must be > 0";
            },
            [](const UniformInt& d) -> std::string { return d.lo <= d.hi ? "" : "uniform_int requires lo <= hi"; },
        },
        dist);
}

double mean(const DistributionSpec& dist) {
    return std::visit(Overloaded{
                          [](const Constant& d) { return d.value; },
                          [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                          [](const Exponential& d) { return d.mean; },
                          [](const UniformInt& d) { return 0.5 * static_cast<double>(d.lo + d.hi); },
                      },
                      dist);
}

double sample(const DistributionSpec& dist, RandomStream& stream) {
    return std::visit(
        Overloaded{
            [](const Constant& d) { return d.value; },
            [&](const Uniform& d) {
                if (d.hi <= d.lo) return d.lo;
                const double x = d.lo + (d.hi - d.lo) * stream.uniform01();
                // lo + span*u can round up to hi for u just below 1.
                return x < d.hi ? x : std::nextafter(d.hi, d.lo);
            },
            [&](const Exponential& d) { return -d.mean * std::log(stream.uniform_open01()); },
            [&](const UniformInt& d) {
                const auto span = static_cast<std::uint64_t>(d.hi - d.lo) + 1;
                return static_cast<double>(d.lo + static_cast<long>(stream.below(span)));
            },
        },
        dist);
}

std::string to_string(const DistributionSpec& dist) {
    return std::visit(
        Overloaded{
            [](const Constant& d) { return "constant(" + format_number(d.value) + ")"; },
            [](const Uniform& d) { return "uniform(" + format_number(d.lo) + ", " + format_number(d.hi) + ")"; },
            [](const Exponential& d) { return "exponential(" + format_number(d.mean) + ")"; },
            [](const UniformInt& d) {
                return "uniform_int(" + std::to_string(d.lo) + ", " + std::to_string(d.hi) + ")";
            },
        },
        dist);
}

DistributionSpec parse_distribution(std::string_view text) {
    text = trim(text);
    const auto open = text.find('(');
    if (open == std::string_view::npos) return Constant{to_double(text)};
    if (text.back() != ')') throw std::invalid_argument("missing ')' in '" + std::string(text) + "'");

    const std::string_view name = trim(text.substr(0, open));
    const std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    std::vector<std::string_view> args;
    std::size_t start = 0;
    for (;;) {
        const auto comma = inner.find(',', start);
        args.push_back(inner.substr(start, comma == std::string_view::npos ? inner.npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    auto want = [&](std::size_t n) {
        if (args.size() != n) {
            throw std::invalid_argument(std::string(name) + " takes " + std::to_string(n) + " argument(s)");
        }
    };
    if (name == "constant") {
        want(1);
        return Constant{to_double(args[0])};
    }
    if (name == "uniform") {
        want(2);
        return Uniform{to_double(args[0]), to_double(args[1])};
    }
    if (name == "exponential") {
        want(1);
        return Exponential{to_double(args[0])};
    }
    if (name == "uniform_int") {
        want(2);
        return UniformInt{to_long(args[0]), to_long(args[1])};
    }
    throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

}  // namespace olapsim
