#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "olapsim/event_queue.hpp"
#include "olapsim/random.hpp"

namespace olapsim {

enum class PolicyKind : std::uint8_t {
    /// Static split from the flow table, renormalized over eligible servers.
    /// Random per-query draw unless the config asks for a deterministic
    /// (smooth weighted round-robin) split.
    FlowWeighted,
    /// Next eligible server after the last pick, in ascending id order.
    RoundRobin,
    /// Fewest outstanding queries from this OLAP server; ties to the lowest id.
    LeastOutstanding,
    /// Random choice with weight 1 / EWMA(observed processing time).
    ResponseTimeWeighted,
};

[[nodiscard]] std::string_view to_string(PolicyKind kind) noexcept;
/// Accepts the snake_case names produced by to_string.
[[nodiscard]] std::optional<PolicyKind> parse_policy(std::string_view name) noexcept;

enum class FlowSplit : std::uint8_t {
    /// Independent weighted draw per query from the policy's stream.
    Random,
    /// Every window of picks matches the weights as closely as integers allow.
    /// With periodic sessions this pins each arrival phase to one server.
    Deterministic,
};

[[nodiscard]] std::string_view to_string(FlowSplit split) noexcept;

struct PolicyConfig {
    PolicyKind kind = PolicyKind::FlowWeighted;
    double ewma_alpha = 0.1;
    FlowSplit flow_split = FlowSplit::Random;

    bool operator==(const PolicyConfig&) const = default;
};

/// Per-OLAP-server scratch state. There is no global balancer.
struct PolicyState {
    explicit PolicyState(std::size_t servers)
        : outstanding(servers, 0), ewma(servers, 0.0), observed(servers, 0), credit(servers, 0.0) {}

    std::optional<std::size_t> last_pick;  // round-robin cursor
    std::vector<std::uint64_t> outstanding;
    std::vector<double> ewma;
    std::vector<std::uint8_t> observed;
    std::vector<double> credit;  // deterministic flow split
};

/// Chooses one of `eligible` (non-empty, ascending server ids). `flow_row` is
/// the OLAP server's flow-table row indexed by server id. Throws
/// NoEligibleServer when FlowWeighted finds zero weight on every eligible server.
std::size_t pick(const PolicyConfig& policy, PolicyState& state, std::span<const std::size_t> eligible,
                 std::span<const double> flow_row, RandomStream& stream);

void observe_dispatch(PolicyState& state, std::size_t server);

/// Decrements the outstanding count and folds `processing_time` into the
/// server's EWMA (the first observation initializes it). Throws
/// InvariantViolation if nothing was outstanding.
void observe_completion(const PolicyConfig& policy, PolicyState& state, std::size_t server, Seconds processing_time);

/// Predicted long-run share per server. FlowWeighted returns the normalized
/// flow row. ResponseTimeWeighted iterates share ~ 1 / E[processing time],
/// with processing = service + M/D/1 wait at `aggregate_rate` q/s, to a
/// fixed point (tolerance 1e-9, at most 10^4 damped steps; NonConvergence
/// otherwise). An aggregate rate of 0 means negligible queueing.
[[nodiscard]] std::vector<double> steady_share(const PolicyConfig& policy, std::span<const double> speed_factors,
                                               std::span<const double> flow_row, Seconds base_service_time,
                                               double aggregate_rate = 0.0);

}  // namespace olapsim
