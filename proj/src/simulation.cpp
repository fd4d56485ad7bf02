#include "olapsim/simulation.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "olapsim/errors.hpp"

namespace olapsim {

namespace {

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffU;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t kHashBasis = 0xcbf29ce484222325ULL;

}  // namespace

Simulation::Simulation(const ScenarioConfig& config)
    : config_(config),
      topology_(make_topology(config)),
      partitions_(make_partition_map(config)),
      driver_(config.workload, resolved_partitions(config), config.run.seed),
      speeds_(config.servers.speeds(config.topology.params.rdbms_servers)),
      noise_(config.run.seed, "servers.service_noise"),
      trace_hash_(kHashBasis),
      dispatch_hash_(kHashBasis) {
    validate(config_);

    duty_cycle_ = effective_duty_cycle(config_.workload, topology_);
    RandomStream starts(config_.run.seed, "workload.session_starts");
    sessions_ = spawn_sessions(config_.workload, duty_cycle_, topology_, starts);

    const auto olap_nodes = topology_.olaps();
    for (std::size_t o = 0; o < olap_nodes.size(); ++o) {
        olaps_.emplace_back(o, topology_, partitions_, config_.routing, config_.run.seed);
    }
    const std::size_t n_rdbms = topology_.rdbms().size();
    std::vector<std::vector<std::size_t>> hosted(n_rdbms);
    for (std::size_t p = 0; p < partitions_.hosts.size(); ++p) {
        for (std::size_t s : partitions_.hosts[p]) hosted[s].push_back(p);
    }
    for (std::size_t r = 0; r < n_rdbms; ++r) rdbms_.emplace_back(r, speeds_[r], hosted[r]);

    // Client requests are small; only link latency is charged on the way in.
    for (std::size_t lan : topology_.lans()) {
        std::vector<Seconds> row;
        for (std::size_t olap : olap_nodes) row.push_back(transfer_delay(topology_, path(topology_, lan, olap), 0.0));
        request_delay_.push_back(std::move(row));
    }

    series_ = std::make_shared<SeriesSet>(n_rdbms, config_.run.metric_interval, config_.run.warmup,
                                          config_.run.reservoir_size, config_.run.seed);
}

Simulation::~Simulation() = default;

std::uint32_t Simulation::allocate_query() {
    std::uint32_t slot;
    if (!free_slots_.empty()) {
        slot = free_slots_.back();
        free_slots_.pop_back();
    } else {
        slot = static_cast<std::uint32_t>(queries_.size());
        queries_.emplace_back();
    }
    queries_[slot] = Query{};
    queries_[slot].id = slot;
    peak_live_ = std::max(peak_live_, queries_.size() - free_slots_.size());
    return slot;
}

void Simulation::release_query(std::uint32_t slot) { free_slots_.push_back(slot); }

SimulationResult Simulation::run() {
    EventQueue queue;
    for (const Session& s : sessions_) queue.schedule(s.start_time, EventKind::SessionStart, s.id);
    queue.schedule(0.0, EventKind::MetricTick);
    RunLimits limits;
    limits.max_events = config_.run.max_events;
    limits.end_time = config_.run.end_time;
    if (std::isfinite(limits.end_time)) queue.schedule(limits.end_time, EventKind::SimEnd);

    SimulationResult result;
    result.run = olapsim::run(queue, limits, [this](const Event& ev, EventQueue& q) { handle(ev, q); });
    check_conservation(queue.now());

    const Seconds window_end = result.run.reason == StopReason::EndTime ? limits.end_time : result.run.final_time;
    result.summary = summarize(*series_, config_.run.warmup, window_end);
    result.counters = counters_;
    result.counters.non_query = driver_.non_query_transactions();
    for (const auto& r : rdbms_) {
        result.completions_per_server.push_back(r.completions());
        result.arrivals_per_server.push_back(r.arrivals());
    }
    result.sessions = sessions_.size();
    result.duty_cycle = duty_cycle_;
    result.http_bytes = driver_.http_bytes();
    result.trace_hash = trace_hash_;
    result.dispatch_hash = dispatch_hash_;
    result.peak_live_queries = peak_live_;
    result.series = series_;
    return result;
}

void Simulation::handle(const Event& ev, EventQueue& queue) {
    trace_hash_ = mix(mix(trace_hash_, std::bit_cast<std::uint64_t>(ev.time)), static_cast<std::uint64_t>(ev.kind));
    if (observer_) observer_(ev);
    switch (ev.kind) {
        case EventKind::SessionStart: driver_.on_start(sessions_[ev.id], queue); break;
        case EventKind::SessionRepetition: driver_.on_repetition(sessions_[ev.id], queue); break;
        case EventKind::PageRefresh: driver_.on_page_refresh(sessions_[ev.id], queue); break;
        case EventKind::ObjectRefresh: on_object_refresh(sessions_[ev.id], queue); break;
        case EventKind::QueryDispatch: on_dispatch(ev.id, queue); break;
        case EventKind::QueryArrival: on_arrival(ev.id, queue); break;
        case EventKind::ServiceStart: on_service_start(ev.id, queue); break;
        case EventKind::ServiceComplete: on_service_complete(ev.id, queue); break;
        case EventKind::MetricTick: on_tick(queue); break;
        case EventKind::SimEnd: check_conservation(queue.now()); break;
    }
}

void Simulation::on_object_refresh(Session& s, EventQueue& queue) {
    const auto draw = driver_.on_object_refresh(s, queue);
    if (!draw) return;
    const std::uint32_t slot = allocate_query();
    Query& q = queries_[slot];
    q.session = s.id;
    q.source = s.olap;
    q.partition = draw->partition;
    q.size = draw->size;
    q.created_at = queue.now();
    ++counters_.created;
    ++counters_.pending;
    queue.schedule(queue.now() + request_delay_[s.lan][s.olap], EventKind::QueryDispatch, slot);
}

void Simulation::on_dispatch(std::uint32_t slot, EventQueue& queue) {
    Query& q = queries_[slot];
    q.dispatched_at = queue.now();
    dispatch_hash_ = mix(mix(dispatch_hash_, std::bit_cast<std::uint64_t>(q.dispatched_at)), q.session);
    const Forwarded f = olaps_[q.source].forward(q.partition, q.size, queue.now());
    q.server = static_cast<std::uint32_t>(f.server);
    --counters_.pending;
    ++counters_.dispatched;
    ++counters_.in_flight;
    queue.schedule(f.arrival_time, EventKind::QueryArrival, slot);
}

void Simulation::on_arrival(std::uint32_t slot, EventQueue& queue) {
    Query& q = queries_[slot];
    RdbmsServer& server = rdbms_[q.server];
    q.arrived_at = queue.now();
    q.arrival_ordinal = server.arrivals();
    --counters_.in_flight;
    ++counters_.in_system;
    record_arrival(*series_, q.server, q.arrived_at);
    if (server.arrive(slot)) queue.schedule(queue.now(), EventKind::ServiceStart, static_cast<std::uint32_t>(q.server));
}

void Simulation::on_service_start(std::size_t server_index, EventQueue& queue) {
    RdbmsServer& server = rdbms_[server_index];
    Query& q = queries_[server.start()];
    q.service_start = queue.now();
    const double noise = sample(config_.servers.service_noise, noise_);
    const Seconds service = service_duration(config_.servers.base_service_time, q.size, server.speed_factor(), noise);
    queue.schedule(queue.now() + service, EventKind::ServiceComplete, static_cast<std::uint32_t>(server_index));
}

void Simulation::on_service_complete(std::size_t server_index, EventQueue& queue) {
    RdbmsServer& server = rdbms_[server_index];
    const auto [slot, more] = server.complete();
    Query& q = queries_[slot];
    q.completed_at = queue.now();

    if (q.arrival_ordinal + 1 != server.completions()) {
        throw InvariantViolation("server " + std::to_string(server_index) + " completed out of FIFO order");
    }
    if (!server.hosts(q.partition)) {
        throw InvariantViolation("server " + std::to_string(server_index) + " served partition " +
                                 std::to_string(q.partition) + " it does not host");
    }
    if (!(q.created_at <= q.dispatched_at && q.dispatched_at <= q.arrived_at && q.arrived_at <= q.service_start &&
          q.service_start <= q.completed_at)) {
        throw InvariantViolation("query " + std::to_string(slot) + " has out-of-order timestamps");
    }

    const Seconds processing = q.completed_at - q.arrived_at;
    const Seconds wait = q.service_start - q.arrived_at;
    record_processing(*series_, server_index, q.completed_at, processing, wait);
    record_busy(*series_, server_index, q.service_start, q.completed_at);
    olaps_[q.source].complete(server_index, processing);

    --counters_.in_system;
    ++counters_.completed;
    release_query(slot);
    if (more) queue.schedule(queue.now(), EventKind::ServiceStart, static_cast<std::uint32_t>(server_index));
}

void Simulation::on_tick(EventQueue& queue) {
    check_conservation(queue.now());
    for (std::size_t r = 0; r < rdbms_.size(); ++r) {
        record_queue_length(*series_, r, queue.now(), static_cast<double>(rdbms_[r].in_system()));
    }
    // Only reschedule while something else can still happen.
    if (!queue.empty()) queue.schedule(queue.now() + config_.run.metric_interval, EventKind::MetricTick);
}

void Simulation::check_conservation(Seconds now) const {
    std::uint64_t held = 0;
    for (const auto& r : rdbms_) held += r.in_system();
    const auto& c = counters_;
    const bool ok = c.created == c.dispatched + c.pending &&
                    c.dispatched == c.completed + c.in_flight + c.in_system && held == c.in_system &&
                    queries_.size() - free_slots_.size() == c.pending + c.in_flight + c.in_system;
    if (!ok) {
        std::ostringstream msg;
        msg << "query conservation broken at t=" << now << ": created=" << c.created << " pending=" << c.pending
            << " dispatched=" << c.dispatched << " in_flight=" << c.in_flight << " in_system=" << c.in_system
            << " (servers hold " << held << ") completed=" << c.completed;
        throw InvariantViolation(msg.str());
    }
}

}  // namespace olapsim
