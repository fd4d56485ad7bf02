#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "olapsim/distribution.hpp"
#include "olapsim/event_queue.hpp"
#include "olapsim/random.hpp"
#include "olapsim/topology.hpp"

namespace olapsim {

/// Bytes in the reference query; service time scales with size / this.
inline constexpr double kReferenceQueryBytes = 10240.0;

enum class SessionMode : std::uint8_t {
    /// Sessions stay active from start to the end of the run.
    AlwaysOn,
    /// Sessions go idle after an on-duration and are revived by repetitions.
    OnOff,
};

/// Only concurrent repetitions exist: a repetition that lands while the
/// session is active extends the active period instead of starting a copy.
enum class RepetitionPattern : std::uint8_t { Concurrent };

struct ProfileConfig {
    DistributionSpec start_time = Uniform{50.0, 55.0};
    DistributionSpec start_offset = Uniform{5.0, 10.0};
    DistributionSpec inter_repetition = Exponential{300.0};
    bool unlimited_repetitions = true;
    std::uint32_t max_repetitions = 0;  // honoured when !unlimited_repetitions
    RepetitionPattern pattern = RepetitionPattern::Concurrent;
    SessionMode mode = SessionMode::AlwaysOn;
    DistributionSpec on_duration = Exponential{600.0};  // OnOff only

    bool operator==(const ProfileConfig&) const = default;
};

struct PageModel {
    DistributionSpec objects_per_page = UniformInt{7, 10};
    DistributionSpec object_size = Uniform{5120.0, 10240.0};
    Seconds object_refresh = 1.0;
    Seconds page_refresh = 10.0;

    bool operator==(const PageModel&) const = default;
};

struct TransactionModel {
    double query_mix = 1.0;
    DistributionSpec interarrival = Constant{1.0};
    DistributionSpec size = Constant{kReferenceQueryBytes};

    bool operator==(const TransactionModel&) const = default;
};

struct PartitionSkew {
    enum class Kind : std::uint8_t { Uniform, Zipf } kind = Kind::Uniform;
    double exponent = 1.0;

    bool operator==(const PartitionSkew&) const = default;
};

[[nodiscard]] std::string to_string(const PartitionSkew& skew);

struct WorkloadConfig {
    ProfileConfig profile;
    PageModel page;
    TransactionModel transactions;
    /// Explicit duty cycle; when unset the cycle is calibrated from target_aggregate.
    std::optional<double> duty_cycle;
    double target_aggregate = 320.0;  // queries/second across the array
    PartitionSkew skew;

    bool operator==(const WorkloadConfig&) const = default;
};

struct Session {
    std::uint32_t id = 0;
    std::uint32_t lan = 0;   // LAN ordinal
    std::uint32_t olap = 0;  // OLAP ordinal
    Seconds start_time = 0.0;
    bool active = false;
    Seconds active_until = 0.0;
    std::uint32_t repetitions = 0;
    std::uint32_t objects_on_page = 0;
    double page_bytes = 0.0;
    std::uint64_t page_redraws = 0;
    std::uint64_t ticks = 0;
};

/// One OLAP-to-RDBMS transaction. Timestamps fill in as it progresses.
struct Query {
    std::uint32_t id = 0;
    std::uint32_t session = 0;
    std::uint32_t source = 0;     // OLAP ordinal
    std::uint32_t partition = 0;
    std::uint32_t server = 0;     // RDBMS ordinal, set on forward
    double size = 0.0;
    Seconds created_at = 0.0;
    Seconds dispatched_at = 0.0;
    Seconds arrived_at = 0.0;
    Seconds service_start = 0.0;
    Seconds completed_at = 0.0;
    std::uint64_t arrival_ordinal = 0;
};

/// target_aggregate / (users * per-session query rate).
/// Throws Infeasible when the result exceeds 1, std::invalid_argument on
/// non-positive inputs.
[[nodiscard]] double calibrate_duty_cycle(double target_aggregate, std::uint64_t users,
                                          const TransactionModel& transactions);

/// Duty cycle in force for `config` over `topology`.
[[nodiscard]] double effective_duty_cycle(const WorkloadConfig& config, const Topology& topology);

/// round-half-up(users * duty_cycle) sessions per LAN, each starting at
/// start_time + start_offset and assigned round-robin over the LAN's
/// destination preferences.
[[nodiscard]] std::vector<Session> spawn_sessions(const WorkloadConfig& config, double duty_cycle,
                                                  const Topology& topology, RandomStream& starts);

/// Uniform or Zipf choice of a warehouse partition.
class PartitionSelector {
public:
    PartitionSelector(std::uint32_t partitions, PartitionSkew skew);

    [[nodiscard]] std::uint32_t partitions() const noexcept { return partitions_; }
    std::uint32_t pick(RandomStream& stream) const;

private:
    std::uint32_t partitions_;
    PartitionSkew skew_;
    std::vector<double> cdf_;
};

inline std::uint32_t assign_partition(const PartitionSelector& selector, RandomStream& stream) {
    return selector.pick(stream);
}

/// What an object refresh asks of the database.
struct QueryDraw {
    double size = 0.0;
    std::uint32_t partition = 0;
};

/// Drives a session's timed behaviour: page redraws, the per-transaction
/// object refresh cadence, and repetitions. Owns one named stream per
/// workload concern so that nothing outside the workload can shift its draws.
class SessionDriver {
public:
    SessionDriver(const WorkloadConfig& config, std::uint32_t partitions, std::uint64_t seed);

    void on_start(Session& s, EventQueue& queue);
    void on_repetition(Session& s, EventQueue& queue);
    void on_page_refresh(Session& s, EventQueue& queue);
    /// Schedules the next refresh and returns the transaction to dispatch, or
    /// nothing if the session has gone idle or drew a non-query transaction.
    std::optional<QueryDraw> on_object_refresh(Session& s, EventQueue& queue);

    [[nodiscard]] double http_bytes() const noexcept { return http_bytes_; }
    [[nodiscard]] std::uint64_t non_query_transactions() const noexcept { return non_query_; }

private:
    void activate(Session& s, EventQueue& queue);
    [[nodiscard]] bool expired(const Session& s, Seconds now) const noexcept;

    WorkloadConfig config_;
    PartitionSelector partitions_;
    RandomStream interarrival_;
    RandomStream object_counts_;
    RandomStream object_sizes_;
    RandomStream query_sizes_;
    RandomStream partition_picks_;
    RandomStream repetitions_;
    RandomStream on_durations_;
    RandomStream query_mix_;
    double http_bytes_ = 0.0;
    std::uint64_t non_query_ = 0;
};

}  // namespace olapsim
