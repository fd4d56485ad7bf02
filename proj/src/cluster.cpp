#include "olapsim/cluster.hpp"

#include <algorithm>

#include "olapsim/errors.hpp"

namespace olapsim {

std::string_view to_string(Placement placement) noexcept {
    switch (placement) {
        case Placement::OnePerServer: return "one_per_server";
        case Placement::ReplicatedAll: return "replicated_all";
        case Placement::Custom: return "custom";
    }
    return "unknown";
}

std::optional<Placement> parse_placement(std::string_view name) noexcept {
    for (auto p : {Placement::OnePerServer, Placement::ReplicatedAll, Placement::Custom}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

PartitionMap make_partition_map(Placement strategy, std::size_t servers, std::size_t partitions,
                                const std::vector<std::vector<std::size_t>>& custom) {
    PartitionMap map;
    switch (strategy) {
        case Placement::OnePerServer:
            if (servers != partitions) {
                throw ShapeMismatch("one_per_server placement needs equal counts, got " + std::to_string(servers) +
                                    " servers and " + std::to_string(partitions) + " partitions");
            }
            for (std::size_t p = 0; p < partitions; ++p) map.hosts.push_back({p});
            break;
        case Placement::ReplicatedAll: {
            std::vector<std::size_t> all(servers);
            for (std::size_t s = 0; s < servers; ++s) all[s] = s;
            map.hosts.assign(partitions, all);
            break;
        }
        case Placement::Custom:
            map.hosts = custom;
            for (auto& hosts : map.hosts) {
                std::sort(hosts.begin(), hosts.end());
                hosts.erase(std::unique(hosts.begin(), hosts.end()), hosts.end());
            }
            break;
    }
    return map;
}

std::vector<std::string> validate(const PartitionMap& map, std::size_t servers) {
    std::vector<std::string> out;
    std::vector<bool> used(servers, false);
    for (std::size_t p = 0; p < map.hosts.size(); ++p) {
        if (map.hosts[p].empty()) out.push_back("partition " + std::to_string(p) + " has no server");
        for (std::size_t s : map.hosts[p]) {
            if (s >= servers) {
                out.push_back("partition " + std::to_string(p) + " names missing server " + std::to_string(s));
            } else {
                used[s] = true;
            }
        }
    }
    for (std::size_t s = 0; s < servers; ++s) {
        if (!used[s]) out.push_back("server " + std::to_string(s) + " hosts no partition");
    }
    return out;
}

RdbmsServer::RdbmsServer(std::size_t id, double speed_factor, std::vector<std::size_t> hosted_partitions)
    : id_(id), speed_(speed_factor), partitions_(std::move(hosted_partitions)) {
    std::sort(partitions_.begin(), partitions_.end());
}

bool RdbmsServer::hosts(std::size_t partition) const noexcept {
    return std::binary_search(partitions_.begin(), partitions_.end(), partition);
}

bool RdbmsServer::arrive(std::uint32_t query) {
    queue_.push_back(query);
    ++arrivals_;
    if (busy_) return false;
    busy_ = true;
    return true;
}

std::uint32_t RdbmsServer::start() {
    if (queue_.empty() || in_service_) throw InvariantViolation("service start with nothing to serve");
    in_service_ = true;
    return queue_.front();
}

std::pair<std::uint32_t, bool> RdbmsServer::complete() {
    if (!in_service_) throw InvariantViolation("completion on a server with nothing in service");
    const std::uint32_t done = queue_.front();
    queue_.pop_front();
    in_service_ = false;
    ++completions_;
    busy_ = !queue_.empty();
    return {done, busy_};
}

OlapServer::OlapServer(std::size_t ordinal, const Topology& topology, const PartitionMap& map, PolicyConfig policy,
                       std::uint64_t seed)
    : ordinal_(ordinal),
      topology_(&topology),
      map_(&map),
      policy_(policy),
      state_(topology.rdbms().size()),
      stream_(seed, "routing.olap." + std::to_string(ordinal)) {
    const std::size_t self = topology.olaps().at(ordinal);
    for (std::size_t r : topology.rdbms()) paths_.push_back(path(topology, self, r));
}

Forwarded OlapServer::forward(std::size_t partition, double bytes, Seconds now) {
    if (partition >= map_->hosts.size() || map_->hosts[partition].empty()) {
        throw NoEligibleServer("partition " + std::to_string(partition) + " has no hosting server");
    }
    const auto& row = topology_->flows.weights.at(ordinal_);
    const std::size_t server = pick(policy_, state_, map_->hosts[partition], row, stream_);
    observe_dispatch(state_, server);
    return {server, now + transfer_delay(*topology_, paths_[server], bytes)};
}

void OlapServer::complete(std::size_t server, Seconds processing_time) {
    observe_completion(policy_, state_, server, processing_time);
}

}  // namespace olapsim
