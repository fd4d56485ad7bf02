#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "olapsim/cluster.hpp"
#include "olapsim/event_queue.hpp"
#include "olapsim/metrics.hpp"
#include "olapsim/scenario.hpp"
#include "olapsim/topology.hpp"
#include "olapsim/workload.hpp"

namespace olapsim {

/// Query population counters. At every instant
///   created    = dispatched + pending
///   dispatched = completed + in_flight + in_system
struct QueryCounters {
    std::uint64_t created = 0;
    std::uint64_t pending = 0;     // created at the client, not yet at its OLAP server
    std::uint64_t dispatched = 0;
    std::uint64_t in_flight = 0;   // forwarded, not yet at the RDBMS server
    std::uint64_t in_system = 0;   // queued or in service
    std::uint64_t completed = 0;
    std::uint64_t non_query = 0;
};

struct SimulationResult {
    RunSummary run;
    SummaryStats summary;
    QueryCounters counters;
    std::vector<std::uint64_t> completions_per_server;
    std::vector<std::uint64_t> arrivals_per_server;
    std::size_t sessions = 0;
    double duty_cycle = 0.0;
    double http_bytes = 0.0;
    std::uint64_t trace_hash = 0;     // every dequeued (time, kind)
    std::uint64_t dispatch_hash = 0;  // (time, session) of each QueryDispatch
    std::size_t peak_live_queries = 0;
    std::shared_ptr<const SeriesSet> series;
};

/// One run of a scenario. Single-threaded; independent instances share nothing.
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& config);
    ~Simulation();

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Called for every dequeued event before it is handled.
    void set_observer(std::function<void(const Event&)> observer) { observer_ = std::move(observer); }

    /// Runs to the configured limits. Throws InvariantViolation on an
    /// accounting or ordering breach.
    SimulationResult run();

    [[nodiscard]] const Topology& topology() const noexcept { return topology_; }
    [[nodiscard]] const std::vector<Session>& sessions() const noexcept { return sessions_; }

private:
    void handle(const Event& ev, EventQueue& queue);
    void on_object_refresh(Session& s, EventQueue& queue);
    void on_dispatch(std::uint32_t slot, EventQueue& queue);
    void on_arrival(std::uint32_t slot, EventQueue& queue);
    void on_service_start(std::size_t server, EventQueue& queue);
    void on_service_complete(std::size_t server, EventQueue& queue);
    void on_tick(EventQueue& queue);
    void check_conservation(Seconds now) const;

    std::uint32_t allocate_query();
    void release_query(std::uint32_t slot);

    ScenarioConfig config_;
    Topology topology_;
    PartitionMap partitions_;
    std::vector<Session> sessions_;
    SessionDriver driver_;
    std::vector<OlapServer> olaps_;
    std::vector<RdbmsServer> rdbms_;
    std::vector<double> speeds_;
    std::vector<std::vector<Seconds>> request_delay_;  // [lan][olap]
    RandomStream noise_;
    std::shared_ptr<SeriesSet> series_;

    std::vector<Query> queries_;
    std::vector<std::uint32_t> free_slots_;
    std::size_t peak_live_ = 0;
    QueryCounters counters_;
    double duty_cycle_ = 0.0;
    std::uint64_t trace_hash_ = 0;
    std::uint64_t dispatch_hash_ = 0;
    std::function<void(const Event&)> observer_;
};

}  // namespace olapsim
