#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "olapsim/distribution.hpp"
#include "olapsim/event_queue.hpp"
#include "olapsim/random.hpp"
#include "olapsim/routing.hpp"
#include "olapsim/topology.hpp"

namespace olapsim {

enum class Placement : std::uint8_t { OnePerServer, ReplicatedAll, Custom };

[[nodiscard]] std::string_view to_string(Placement placement) noexcept;
[[nodiscard]] std::optional<Placement> parse_placement(std::string_view name) noexcept;

/// hosts[partition] = ascending RDBMS ordinals holding a replica.
struct PartitionMap {
    std::vector<std::vector<std::size_t>> hosts;

    [[nodiscard]] std::size_t partitions() const noexcept { return hosts.size(); }
    bool operator==(const PartitionMap&) const = default;
};

/// OnePerServer maps partition i to server i and throws ShapeMismatch unless
/// the counts agree. ReplicatedAll puts every partition on every server.
/// Custom takes `custom` as given (sorted and deduplicated per partition).
[[nodiscard]] PartitionMap make_partition_map(Placement strategy, std::size_t servers, std::size_t partitions,
                                              const std::vector<std::vector<std::size_t>>& custom = {});

/// Empty iff every partition has a host, every host exists, and every server holds a partition.
[[nodiscard]] std::vector<std::string> validate(const PartitionMap& map, std::size_t servers);

struct ServerConfig {
    Seconds base_service_time = 0.020;  // per reference-size query at speed 1
    std::vector<double> speed_factors;  // one per RDBMS server; empty: all 1.0
    std::uint32_t partitions = 0;       // 0: one per RDBMS server
    Placement placement = Placement::ReplicatedAll;
    std::vector<std::vector<std::size_t>> partition_map;  // Custom only
    DistributionSpec service_noise = Constant{1.0};       // multiplicative factor

    /// speed_factors when given, otherwise 1.0 for each of `servers`.
    [[nodiscard]] std::vector<double> speeds(std::size_t servers) const {
        return speed_factors.empty() ? std::vector<double>(servers, 1.0) : speed_factors;
    }

    bool operator==(const ServerConfig&) const = default;
};

/// base * (bytes / reference bytes) * noise / speed.
[[nodiscard]] inline Seconds service_duration(Seconds base_service_time, double bytes, double speed_factor,
                                              double noise = 1.0) noexcept {
    return base_service_time * (bytes / 10240.0) * noise / speed_factor;
}

/// FIFO single-server queueing station. The query in service stays at the
/// front of the queue until it completes.
class RdbmsServer {
public:
    RdbmsServer(std::size_t id, double speed_factor, std::vector<std::size_t> hosted_partitions);

    /// Enqueues a query; true when the server was idle and service must start.
    bool arrive(std::uint32_t query);
    /// The query whose service begins now.
    [[nodiscard]] std::uint32_t start();
    /// Removes the query in service; the returned flag says whether another is waiting.
    std::pair<std::uint32_t, bool> complete();

    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] double speed_factor() const noexcept { return speed_; }
    [[nodiscard]] bool busy() const noexcept { return busy_; }
    [[nodiscard]] bool hosts(std::size_t partition) const noexcept;
    [[nodiscard]] const std::vector<std::size_t>& partitions() const noexcept { return partitions_; }
    /// Queued plus in service.
    [[nodiscard]] std::size_t in_system() const noexcept { return queue_.size(); }
    [[nodiscard]] std::uint64_t arrivals() const noexcept { return arrivals_; }
    [[nodiscard]] std::uint64_t completions() const noexcept { return completions_; }

private:
    std::size_t id_;
    double speed_;
    std::vector<std::size_t> partitions_;
    std::deque<std::uint32_t> queue_;
    bool busy_ = false;
    bool in_service_ = false;
    std::uint64_t arrivals_ = 0;
    std::uint64_t completions_ = 0;
};

struct Forwarded {
    std::size_t server = 0;
    Seconds arrival_time = 0.0;
};

/// An OLAP application server: a pure forwarder (no processing delay) that
/// owns its routing state and routing stream.
class OlapServer {
public:
    OlapServer(std::size_t ordinal, const Topology& topology, const PartitionMap& map, PolicyConfig policy,
               std::uint64_t seed);

    /// Picks a host of `partition`, records the dispatch in the policy state
    /// and returns the server with the time the query lands there.
    /// Throws NoEligibleServer when the partition has no host.
    Forwarded forward(std::size_t partition, double bytes, Seconds now);
    void complete(std::size_t server, Seconds processing_time);

    [[nodiscard]] const PolicyState& state() const noexcept { return state_; }
    [[nodiscard]] std::size_t ordinal() const noexcept { return ordinal_; }

private:
    std::size_t ordinal_;
    const Topology* topology_;
    const PartitionMap* map_;
    PolicyConfig policy_;
    PolicyState state_;
    RandomStream stream_;
    std::vector<std::vector<std::size_t>> paths_;  // per RDBMS ordinal
};

}  // namespace olapsim
