#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "olapsim/event_queue.hpp"

namespace olapsim {

enum class NodeKind : std::uint8_t { LanSegment, IspGateway, CloudSwitch, OlapServer, RdbmsServer };

struct Node {
    std::string id;
    NodeKind kind = NodeKind::CloudSwitch;
    std::uint32_t users = 0;  // LanSegment only

    bool operator==(const Node&) const = default;
};

struct LinkParams {
    double bandwidth_bps = 1e9;
    Seconds latency = 50e-6;

    bool operator==(const LinkParams&) const = default;
};

/// Undirected link between two node indices.
struct Link {
    std::size_t a = 0;
    std::size_t b = 0;
    LinkParams params;

    bool operator==(const Link&) const = default;
};

/// weights[olap][rdbms]: share of an OLAP server's queries sent to each RDBMS server.
/// Rows and columns follow Topology::olaps() / Topology::rdbms() order.
struct FlowTable {
    std::vector<std::vector<double>> weights;

    bool operator==(const FlowTable&) const = default;
};

class Topology {
public:
    std::size_t add_node(Node node);
    /// Throws std::invalid_argument if either id is unknown.
    std::size_t add_link(std::string_view a, std::string_view b, LinkParams params);
    /// Appends a link by index without checks; validate() reports bad ones.
    void add_raw_link(Link link) { links_.push_back(link); }

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }
    [[nodiscard]] std::optional<std::size_t> find(std::string_view id) const;

    /// Node indices of each kind, in insertion order.
    [[nodiscard]] std::vector<std::size_t> nodes_of(NodeKind kind) const;
    [[nodiscard]] std::vector<std::size_t> lans() const { return nodes_of(NodeKind::LanSegment); }
    [[nodiscard]] std::vector<std::size_t> olaps() const { return nodes_of(NodeKind::OlapServer); }
    [[nodiscard]] std::vector<std::size_t> rdbms() const { return nodes_of(NodeKind::RdbmsServer); }

    [[nodiscard]] std::uint64_t total_users() const;

    FlowTable flows;
    /// preferences[lan ordinal] = OLAP ordinals the LAN's clients may use.
    std::vector<std::vector<std::size_t>> preferences;

    bool operator==(const Topology&) const = default;

private:
    std::vector<Node> nodes_;
    std::vector<Link> links_;
};

/// Counts and link parameters for the two-domain layout. Defaults give the
/// 25-node reference network: six 500-user LANs behind three ISP gateways,
/// ingress switch 4, OLAP tier on switch 2, RDBMS servers split across
/// switches 1 and 3.
struct TopologyParams {
    std::uint32_t lans = 6;
    std::uint32_t users_per_lan = 500;
    std::uint32_t lans_per_gateway = 2;
    std::uint32_t olap_servers = 4;
    std::uint32_t rdbms_servers = 8;
    LinkParams cloud_link{1e9, 50e-6};
    LinkParams extranet_link{100e6, 5e-3};

    bool operator==(const TopologyParams&) const = default;
};

/// Builds the layout for `params` with uniform flow weights and every LAN
/// preferring every OLAP server.
[[nodiscard]] Topology build_topology(const TopologyParams& params);

[[nodiscard]] inline Topology build_reference_topology() { return build_topology(TopologyParams{}); }

/// Fewest-hop path from `src` to `dst` as link indices. Breadth-first over
/// links in insertion order, so the result is deterministic.
/// Throws NoRoute when unreachable, std::invalid_argument for unknown ids.
[[nodiscard]] std::vector<std::size_t> path(const Topology& topology, std::string_view src,
                                            std::string_view dst);
[[nodiscard]] std::vector<std::size_t> path(const Topology& topology, std::size_t src, std::size_t dst);

/// Store-and-forward delay: sum over links of latency + bytes * 8 / bandwidth.
[[nodiscard]] Seconds transfer_delay(const Topology& topology, const std::vector<std::size_t>& links,
                                     double bytes);

/// Human-readable violations; empty iff the topology is well formed.
[[nodiscard]] std::vector<std::string> validate(const Topology& topology);

}  // namespace olapsim
