#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace olapsim {

/// 64-bit FNV-1a. Used for stream derivation and content hashes.
[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes,
                                  std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

/// A named, seeded pseudo-random stream.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The per-stream seed is splitmix64(seed ^ fnv1a(name)), so each
/// workload or policy concern draws from its own sequence and adding a new
/// consumer never perturbs an existing one. All real-valued conversions are
/// done here rather than through <random> distributions, whose algorithms
/// are implementation-defined.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::string_view name);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open01() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

    /// Uniform integer in [0, bound), bound > 0, unbiased.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

}  // namespace olapsim
