#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olapsim/cluster.hpp"
#include "olapsim/routing.hpp"
#include "olapsim/topology.hpp"
#include "olapsim/workload.hpp"

namespace olapsim {

inline constexpr std::string_view kToolVersion = "0.3.0";

struct TopologySection {
    TopologyParams params;
    /// Applied to every OLAP row when set.
    std::optional<std::vector<double>> flow_weights;
    /// Per-OLAP overrides keyed by node id ("olap_2"), applied after flow_weights.
    std::map<std::string, std::vector<double>> flow_rows;

    bool operator==(const TopologySection&) const = default;
};

struct RunConfig {
    std::string scenario_id = "reference";
    std::uint64_t seed = 1;
    std::uint64_t max_events = 50'000'000;
    Seconds end_time = std::numeric_limits<Seconds>::infinity();
    Seconds warmup = 100.0;
    Seconds metric_interval = 1.0;
    std::size_t reservoir_size = 10'000;
    /// Empty: $OLAPSIM_OUTPUT_ROOT (or ./olapsim_out) / scenario_id.
    std::string output_dir;

    bool operator==(const RunConfig&) const = default;
};

/// Everything needed to reproduce one experiment. A default-constructed
/// value is the reference scenario.
struct ScenarioConfig {
    TopologySection topology;
    WorkloadConfig workload;
    ServerConfig servers;
    PolicyConfig routing;
    RunConfig run;

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses the sectioned key/value format:
///
///     # comment
///     [workload]
///     interarrival = constant(0.5)
///     [servers]
///     speed_factors = [1, 1, 1, 1, 0.5, 0.5, 0.5, 0.5]
///
/// Unspecified keys keep their defaults, so empty text yields the reference
/// scenario. Syntax problems throw ParseError (with line); bad values throw
/// ValidationError naming "section.key". The result is fully validated.
[[nodiscard]] ScenarioConfig parse_scenario(std::string_view text);

/// Sets one "section.key" from value text, as if it appeared in a file.
void apply_override(ScenarioConfig& config, std::string_view field, std::string_view value);

/// Throws ValidationError for the first violated constraint.
void validate(const ScenarioConfig& config);

/// Canonical, fully resolved text form. Parsing it reproduces an equivalent
/// scenario and the same dump.
[[nodiscard]] std::string dump(const ScenarioConfig& config);

/// FNV-1a over the canonical dump, excluding the output directory.
[[nodiscard]] std::uint64_t config_hash(const ScenarioConfig& config);

[[nodiscard]] std::uint32_t resolved_partitions(const ScenarioConfig& config) noexcept;

/// Topology with flow-weight overrides applied.
[[nodiscard]] Topology make_topology(const ScenarioConfig& config);
[[nodiscard]] PartitionMap make_partition_map(const ScenarioConfig& config);

}  // namespace olapsim
