#include "olapsim/topology.hpp"

#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "olapsim/errors.hpp"

namespace olapsim {

std::size_t Topology::add_node(Node node) {
    nodes_.push_back(std::move(node));
    return nodes_.size() - 1;
}

std::size_t Topology::add_link(std::string_view a, std::string_view b, LinkParams params) {
    const auto ia = find(a);
    const auto ib = find(b);
    if (!ia || !ib) {
        throw std::invalid_argument("link endpoint not found: " + std::string(ia ? b : a));
    }
    links_.push_back(Link{*ia, *ib, params});
    return links_.size() - 1;
}

std::optional<std::size_t> Topology::find(std::string_view id) const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].id == id) return i;
    }
    return std::nullopt;
}

std::vector<std::size_t> Topology::nodes_of(NodeKind kind) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind == kind) out.push_back(i);
    }
    return out;
}

std::uint64_t Topology::total_users() const {
    std::uint64_t n = 0;
    for (const auto& node : nodes_) n += node.users;
    return n;
}

Topology build_topology(const TopologyParams& p) {
    Topology t;
    auto numbered = [](const char* prefix, std::uint32_t i) { return std::string(prefix) + std::to_string(i + 1); };

    for (std::uint32_t i = 0; i < 4; ++i) t.add_node({numbered("cloud_sw_", i), NodeKind::CloudSwitch, 0});
    // Switch 4 takes all inbound traffic and hands it to switch 2 (OLAP tier),
    // which reaches the two RDBMS switches.
    t.add_link("cloud_sw_4", "cloud_sw_2", p.cloud_link);
    t.add_link("cloud_sw_2", "cloud_sw_1", p.cloud_link);
    t.add_link("cloud_sw_2", "cloud_sw_3", p.cloud_link);

    const std::uint32_t per_gw = std::max<std::uint32_t>(1, p.lans_per_gateway);
    const std::uint32_t gateways = (p.lans + per_gw - 1) / per_gw;
    for (std::uint32_t g = 0; g < gateways; ++g) {
        t.add_node({numbered("isp_gw_", g), NodeKind::IspGateway, 0});
        t.add_link(numbered("isp_gw_", g), "cloud_sw_4", p.extranet_link);
    }
    for (std::uint32_t l = 0; l < p.lans; ++l) {
        t.add_node({numbered("lan_", l), NodeKind::LanSegment, p.users_per_lan});
        t.add_link(numbered("lan_", l), numbered("isp_gw_", l / per_gw), p.extranet_link);
    }
    for (std::uint32_t o = 0; o < p.olap_servers; ++o) {
        t.add_node({numbered("olap_", o), NodeKind::OlapServer, 0});
        t.add_link(numbered("olap_", o), "cloud_sw_2", p.cloud_link);
    }
    // First half (rounded up) on switch 1, the rest on switch 3.
    const std::uint32_t on_sw1 = (p.rdbms_servers + 1) / 2;
    for (std::uint32_t r = 0; r < p.rdbms_servers; ++r) {
        t.add_node({numbered("rdbms_", r), NodeKind::RdbmsServer, 0});
        t.add_link(numbered("rdbms_", r), r < on_sw1 ? "cloud_sw_1" : "cloud_sw_3", p.cloud_link);
    }

    const double even = p.rdbms_servers ? 1.0 / p.rdbms_servers : 0.0;
    t.flows.weights.assign(p.olap_servers, std::vector<double>(p.rdbms_servers, even));
    std::vector<std::size_t> all_olaps(p.olap_servers);
    std::iota(all_olaps.begin(), all_olaps.end(), std::size_t{0});
    t.preferences.assign(p.lans, all_olaps);
    return t;
}

std::vector<std::size_t> path(const Topology& topology, std::string_view src, std::string_view dst) {
    const auto s = topology.find(src);
    const auto d = topology.find(dst);
    if (!s || !d) throw std::invalid_argument("unknown node: " + std::string(s ? dst : src));
    return path(topology, *s, *d);
}

std::vector<std::size_t> path(const Topology& topology, std::size_t src, std::size_t dst) {
    const auto& nodes = topology.nodes();
    const auto& links = topology.links();
    if (src >= nodes.size() || dst >= nodes.size()) throw std::invalid_argument("node index out of range");
    if (src == dst) return {};

    constexpr auto kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> via(nodes.size(), kNone);
    std::vector<bool> seen(nodes.size(), false);
    std::deque<std::size_t> frontier{src};
    seen[src] = true;
    while (!frontier.empty() && !seen[dst]) {
        const std::size_t at = frontier.front();
        frontier.pop_front();
        for (std::size_t li = 0; li < links.size(); ++li) {
            const Link& l = links[li];
            std::size_t next;
            if (l.a == at) next = l.b;
            else if (l.b == at) next = l.a;
            else continue;
            if (next >= nodes.size() || seen[next]) continue;
            seen[next] = true;
            via[next] = li;
            frontier.push_back(next);
        }
    }
    if (!seen[dst]) throw NoRoute("no route from " + nodes[src].id + " to " + nodes[dst].id);

    std::vector<std::size_t> out;
    for (std::size_t at = dst; at != src;) {
        const Link& l = links[via[at]];
        out.push_back(via[at]);
        at = l.a == at ? l.b : l.a;
    }
    return {out.rbegin(), out.rend()};
}

Seconds transfer_delay(const Topology& topology, const std::vector<std::size_t>& links, double bytes) {
    Seconds total = 0.0;
    for (std::size_t li : links) {
        const LinkParams& p = topology.links().at(li).params;
        total += p.latency + bytes * 8.0 / p.bandwidth_bps;
    }
    return total;
}

std::vector<std::string> validate(const Topology& t) {
    std::vector<std::string> out;
    const auto& nodes = t.nodes();

    std::set<std::string> ids;
    for (const auto& n : nodes) {
        if (!ids.insert(n.id).second) out.push_back("duplicate node id '" + n.id + "'");
    }
    for (std::size_t i = 0; i < t.links().size(); ++i) {
        const Link& l = t.links()[i];
        const std::string name = "link " + std::to_string(i);
        if (l.a >= nodes.size() || l.b >= nodes.size()) {
            out.push_back(name + " references a missing node");
            continue;
        }
        if (l.a == l.b) out.push_back(name + " connects " + nodes[l.a].id + " to itself");
        if (!(l.params.bandwidth_bps > 0.0)) out.push_back(name + " has non-positive bandwidth");
        if (!(l.params.latency >= 0.0)) out.push_back(name + " has negative latency");
    }

    if (!nodes.empty()) {
        std::vector<bool> seen(nodes.size(), false);
        std::deque<std::size_t> frontier{0};
        seen[0] = true;
        while (!frontier.empty()) {
            const std::size_t at = frontier.front();
            frontier.pop_front();
            for (const Link& l : t.links()) {
                if (l.a >= nodes.size() || l.b >= nodes.size()) continue;
                const std::size_t next = l.a == at ? l.b : (l.b == at ? l.a : at);
                if (next != at && !seen[next]) {
                    seen[next] = true;
                    frontier.push_back(next);
                }
            }
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!seen[i]) out.push_back("node '" + nodes[i].id + "' is disconnected from '" + nodes[0].id + "'");
        }
    }

    const auto lans = t.lans();
    const auto olaps = t.olaps();
    const auto rdbms = t.rdbms();
    if (t.preferences.size() != lans.size()) {
        out.push_back("destination preferences cover " + std::to_string(t.preferences.size()) + " LANs, expected " +
                      std::to_string(lans.size()));
    }
    for (std::size_t l = 0; l < lans.size() && l < t.preferences.size(); ++l) {
        if (t.preferences[l].empty()) out.push_back("LAN '" + nodes[lans[l]].id + "' has no OLAP destination");
        for (std::size_t o : t.preferences[l]) {
            if (o >= olaps.size()) out.push_back("LAN '" + nodes[lans[l]].id + "' prefers a missing OLAP server");
        }
    }

    const auto& w = t.flows.weights;
    if (w.size() != olaps.size()) {
        out.push_back("flow table has " + std::to_string(w.size()) + " rows, expected " + std::to_string(olaps.size()));
        return out;
    }
    std::vector<bool> fed(rdbms.size(), false);
    for (std::size_t o = 0; o < w.size(); ++o) {
        const std::string& name = nodes[olaps[o]].id;
        if (w[o].size() != rdbms.size()) {
            out.push_back("flow row for '" + name + "' has " + std::to_string(w[o].size()) + " weights, expected " +
                          std::to_string(rdbms.size()));
            continue;
        }
        double sum = 0.0;
        bool any_positive = false;
        bool negative = false;
        for (std::size_t r = 0; r < w[o].size(); ++r) {
            if (w[o][r] < 0.0 || !std::isfinite(w[o][r])) negative = true;
            if (w[o][r] > 0.0) {
                any_positive = true;
                fed[r] = true;
            }
            sum += w[o][r];
        }
        if (negative) out.push_back("flow row for '" + name + "' has a negative or non-finite weight");
        if (!any_positive) {
            out.push_back("OLAP server '" + name + "' has no positive-weight RDBMS flow");
        } else if (std::abs(sum - 1.0) > 1e-9) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "flow weights for '" << name << "' sum to " << sum << ", expected 1";
            out.push_back(msg.str());
        }
    }
    for (std::size_t r = 0; r < rdbms.size(); ++r) {
        if (!fed[r]) out.push_back("RDBMS server '" + nodes[rdbms[r]].id + "' receives no flow");
    }
    return out;
}

}  // namespace olapsim
