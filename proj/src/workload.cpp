#include "olapsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "olapsim/errors.hpp"
#include "olapsim/text.hpp"

namespace olapsim {

std::string to_string(const PartitionSkew& skew) {
    if (skew.kind == PartitionSkew::Kind::Uniform) return "uniform";
    return "zipf(" + format_number(skew.exponent) + ")";
}

double calibrate_duty_cycle(double target_aggregate, std::uint64_t users, const TransactionModel& transactions) {
    if (!(target_aggregate > 0.0)) throw std::invalid_argument("target aggregate rate must be > 0");
    if (users == 0) throw std::invalid_argument("user count must be > 0");
    const double per_session = transactions.query_mix / mean(transactions.interarrival);
    const double duty = target_aggregate / (static_cast<double>(users) * per_session);
    if (duty > 1.0) {
        throw Infeasible("target of " + format_number(target_aggregate) + " q/s needs duty cycle " +
                         format_number(duty) + " > 1 with " + std::to_string(users) + " users");
    }
    return duty;
}

double effective_duty_cycle(const WorkloadConfig& config, const Topology& topology) {
    if (config.duty_cycle) return *config.duty_cycle;
    return calibrate_duty_cycle(config.target_aggregate, topology.total_users(), config.transactions);
}

std::vector<Session> spawn_sessions(const WorkloadConfig& config, double duty_cycle, const Topology& topology,
                                    RandomStream& starts) {
    std::vector<Session> sessions;
    const auto lans = topology.lans();
    for (std::uint32_t l = 0; l < lans.size(); ++l) {
        const double wanted = topology.nodes()[lans[l]].users * duty_cycle;
        const auto count = static_cast<std::uint64_t>(std::floor(wanted + 0.5));
        const auto& prefs = topology.preferences.at(l);
        for (std::uint64_t k = 0; k < count; ++k) {
            Session s;
            s.id = static_cast<std::uint32_t>(sessions.size());
            s.lan = l;
            s.olap = static_cast<std::uint32_t>(prefs[k % prefs.size()]);
            s.start_time = sample(config.profile.start_time, starts);
            s.start_time += sample(config.profile.start_offset, starts);
            sessions.push_back(s);
        }
    }
    return sessions;
}

PartitionSelector::PartitionSelector(std::uint32_t partitions, PartitionSkew skew)
    : partitions_(partitions), skew_(skew) {
    if (partitions == 0) throw std::invalid_argument("partition count must be >= 1");
    if (skew.kind == PartitionSkew::Kind::Zipf) {
        cdf_.resize(partitions);
        double total = 0.0;
        for (std::uint32_t k = 0; k < partitions; ++k) {
            total += 1.0 / std::pow(static_cast<double>(k + 1), skew.exponent);
            cdf_[k] = total;
        }
        for (double& c : cdf_) c /= total;
    }
}

std::uint32_t PartitionSelector::pick(RandomStream& stream) const {
    if (partitions_ == 1) return 0;
    if (skew_.kind == PartitionSkew::Kind::Uniform) return static_cast<std::uint32_t>(stream.below(partitions_));
    const double u = stream.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<std::uint32_t>(std::min<std::ptrdiff_t>(it - cdf_.begin(), partitions_ - 1));
}

SessionDriver::SessionDriver(const WorkloadConfig& config, std::uint32_t partitions, std::uint64_t seed)
    : config_(config),
      partitions_(partitions, config.skew),
      interarrival_(seed, "workload.interarrival"),
      object_counts_(seed, "workload.object_counts"),
      object_sizes_(seed, "workload.object_sizes"),
      query_sizes_(seed, "workload.query_sizes"),
      partition_picks_(seed, "workload.partitions"),
      repetitions_(seed, "workload.inter_repetitions"),
      on_durations_(seed, "workload.on_durations"),
      query_mix_(seed, "workload.query_mix") {}

bool SessionDriver::expired(const Session& s, Seconds now) const noexcept {
    return config_.profile.mode == SessionMode::OnOff && now >= s.active_until;
}

void SessionDriver::activate(Session& s, EventQueue& queue) {
    const Seconds now = queue.now();
    s.active = true;
    s.active_until = config_.profile.mode == SessionMode::AlwaysOn
                         ? std::numeric_limits<Seconds>::infinity()
                         : now + sample(config_.profile.on_duration, on_durations_);
    queue.schedule(now, EventKind::PageRefresh, s.id);
    queue.schedule(now, EventKind::ObjectRefresh, s.id);
}

void SessionDriver::on_start(Session& s, EventQueue& queue) {
    activate(s, queue);
    if (config_.profile.mode == SessionMode::OnOff &&
        (config_.profile.unlimited_repetitions || config_.profile.max_repetitions > 0)) {
        queue.schedule(queue.now() + sample(config_.profile.inter_repetition, repetitions_),
                       EventKind::SessionRepetition, s.id);
    }
}

void SessionDriver::on_repetition(Session& s, EventQueue& queue) {
    const Seconds now = queue.now();
    ++s.repetitions;
    if (s.active) {
        // Concurrent pattern: merge into the running activation.
        s.active_until = std::max(s.active_until, now + sample(config_.profile.on_duration, on_durations_));
    } else {
        activate(s, queue);
    }
    if (config_.profile.unlimited_repetitions || s.repetitions < config_.profile.max_repetitions) {
        queue.schedule(now + sample(config_.profile.inter_repetition, repetitions_), EventKind::SessionRepetition,
                       s.id);
    }
}

void SessionDriver::on_page_refresh(Session& s, EventQueue& queue) {
    if (!s.active || expired(s, queue.now())) return;
    s.objects_on_page = static_cast<std::uint32_t>(sample(config_.page.objects_per_page, object_counts_));
    s.page_bytes = 0.0;
    for (std::uint32_t i = 0; i < s.objects_on_page; ++i) s.page_bytes += sample(config_.page.object_size, object_sizes_);
    ++s.page_redraws;
    queue.schedule(queue.now() + config_.page.page_refresh, EventKind::PageRefresh, s.id);
}

std::optional<QueryDraw> SessionDriver::on_object_refresh(Session& s, EventQueue& queue) {
    if (!s.active) return std::nullopt;
    if (expired(s, queue.now())) {
        s.active = false;
        return std::nullopt;
    }
    ++s.ticks;
    http_bytes_ += s.page_bytes;
    queue.schedule(queue.now() + sample(config_.transactions.interarrival, interarrival_), EventKind::ObjectRefresh,
                   s.id);
    if (config_.transactions.query_mix < 1.0 && query_mix_.uniform01() >= config_.transactions.query_mix) {
        ++non_query_;
        return std::nullopt;
    }
    QueryDraw draw;
    draw.size = sample(config_.transactions.size, query_sizes_);
    draw.partition = partitions_.pick(partition_picks_);
    return draw;
}

}  // namespace olapsim
