#include "olapsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "olapsim/errors.hpp"
#include "olapsim/text.hpp"

namespace olapsim {

namespace {

constexpr std::string_view kSections[] = {"run", "topology", "workload", "servers", "routing"};

// Value conversions. Each takes the "section.key" name for diagnostics.
class Field {
public:
    Field(std::string name, std::string_view text, std::size_t line)
        : name_(std::move(name)), text_(trim(text)), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ValidationError(name_, line_ ? what + " (line " + std::to_string(line_) + ")" : what);
    }

    [[nodiscard]] std::string_view text() const noexcept { return text_; }

    [[nodiscard]] double number() const { return number_from(text_); }

    [[nodiscard]] std::uint64_t count() const {
        const double v = number();
        if (v < 0.0 || v != std::floor(v) || v > 1.8e19) fail("expected a non-negative integer, got '" + str() + "'");
        return static_cast<std::uint64_t>(v);
    }

    [[nodiscard]] std::uint32_t count32() const {
        const auto v = count();
        if (v > 0xffffffffULL) fail("value too large");
        return static_cast<std::uint32_t>(v);
    }

    [[nodiscard]] DistributionSpec distribution() const {
        try {
            return parse_distribution(text_);
        } catch (const std::invalid_argument& e) {
            fail(e.what());
        }
    }

    [[nodiscard]] std::vector<double> numbers() const {
        std::vector<double> out;
        for (std::string_view item : list_items(text_)) out.push_back(number_from(item));
        return out;
    }

    [[nodiscard]] std::vector<std::vector<std::size_t>> nested_indices() const {
        std::vector<std::vector<std::size_t>> out;
        for (std::string_view inner : list_items(text_)) {
            std::vector<std::size_t> row;
            for (std::string_view item : list_items(inner)) {
                const double v = number_from(item);
                if (v < 0.0 || v != std::floor(v)) fail("expected server indices, got '" + std::string(item) + "'");
                row.push_back(static_cast<std::size_t>(v));
            }
            out.push_back(std::move(row));
        }
        return out;
    }

    [[nodiscard]] std::string word() const {
        std::string_view t = text_;
        if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
        return std::string(t);
    }

private:
    [[nodiscard]] std::string str() const { return std::string(text_); }

    [[nodiscard]] double number_from(std::string_view t) const {
        t = trim(t);
        if (t == "none" || t == "inf") return std::numeric_limits<double>::infinity();
        double v = 0.0;
        const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
        if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
            fail("expected a number, got '" + std::string(t) + "'");
        }
        return v;
    }

    // Splits "[a, [b, c], d]" at top-level commas.
    [[nodiscard]] std::vector<std::string_view> list_items(std::string_view t) const {
        t = trim(t);
        if (t.size() < 2 || t.front() != '[' || t.back() != ']') fail("expected a list like [1, 2], got '" + std::string(t) + "'");
        t = trim(t.substr(1, t.size() - 2));
        std::vector<std::string_view> items;
        if (t.empty()) return items;
        int depth = 0;
        std::size_t start = 0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] == '[') ++depth;
            else if (t[i] == ']') --depth;
            else if (t[i] == ',' && depth == 0) {
                items.push_back(trim(t.substr(start, i - start)));
                start = i + 1;
            }
        }
        items.push_back(trim(t.substr(start)));
        return items;
    }

    std::string name_;
    std::string_view text_;
    std::size_t line_;
};

void set_field(ScenarioConfig& c, std::string_view section, std::string_view key, std::string_view value,
               std::size_t line) {
    const Field f(std::string(section) + "." + std::string(key), value, line);
    auto unknown = [&]() { f.fail("unknown key"); };

    if (section == "run") {
        RunConfig& r = c.run;
        if (key == "scenario_id") r.scenario_id = f.word();
        else if (key == "seed") r.seed = f.count();
        else if (key == "max_events") r.max_events = f.count();
        else if (key == "end_time") r.end_time = f.number();
        else if (key == "warmup") r.warmup = f.number();
        else if (key == "metric_interval") r.metric_interval = f.number();
        else if (key == "reservoir_size") r.reservoir_size = f.count();
        else if (key == "output_dir") r.output_dir = f.word();
        else unknown();
    } else if (section == "topology") {
        TopologyParams& p = c.topology.params;
        if (key == "lans") p.lans = f.count32();
        else if (key == "users_per_lan") p.users_per_lan = f.count32();
        else if (key == "lans_per_gateway") p.lans_per_gateway = f.count32();
        else if (key == "olap_servers") p.olap_servers = f.count32();
        else if (key == "rdbms_servers") p.rdbms_servers = f.count32();
        else if (key == "cloud_bandwidth") p.cloud_link.bandwidth_bps = f.number();
        else if (key == "cloud_latency") p.cloud_link.latency = f.number();
        else if (key == "extranet_bandwidth") p.extranet_link.bandwidth_bps = f.number();
        else if (key == "extranet_latency") p.extranet_link.latency = f.number();
        else if (key == "flow_weights") c.topology.flow_weights = f.numbers();
        else if (key.starts_with("flow_weights.")) c.topology.flow_rows[std::string(key.substr(13))] = f.numbers();
        else unknown();
    } else if (section == "workload") {
        WorkloadConfig& w = c.workload;
        if (key == "start_time") w.profile.start_time = f.distribution();
        else if (key == "start_offset") w.profile.start_offset = f.distribution();
        else if (key == "inter_repetition") w.profile.inter_repetition = f.distribution();
        else if (key == "repetitions") {
            if (f.word() == "unlimited") {
                w.profile.unlimited_repetitions = true;
                w.profile.max_repetitions = 0;
            } else {
                w.profile.unlimited_repetitions = false;
                w.profile.max_repetitions = f.count32();
            }
        } else if (key == "repetition_pattern") {
            if (f.word() != "concurrent") f.fail("only 'concurrent' is supported");
            w.profile.pattern = RepetitionPattern::Concurrent;
        } else if (key == "session_mode") {
            const std::string m = f.word();
            if (m == "always_on") w.profile.mode = SessionMode::AlwaysOn;
            else if (m == "on_off") w.profile.mode = SessionMode::OnOff;
            else f.fail("expected always_on or on_off, got '" + m + "'");
        } else if (key == "on_duration") w.profile.on_duration = f.distribution();
        else if (key == "duty_cycle") {
            if (f.word() == "auto") w.duty_cycle.reset();
            else w.duty_cycle = f.number();
        } else if (key == "target_aggregate") w.target_aggregate = f.number();
        else if (key == "objects_per_page") w.page.objects_per_page = f.distribution();
        else if (key == "object_size") w.page.object_size = f.distribution();
        else if (key == "object_refresh") w.page.object_refresh = f.number();
        else if (key == "page_refresh") w.page.page_refresh = f.number();
        else if (key == "query_mix") w.transactions.query_mix = f.number();
        else if (key == "interarrival") w.transactions.interarrival = f.distribution();
        else if (key == "size") w.transactions.size = f.distribution();
        else if (key == "partition_skew") {
            const std::string s = f.word();
            if (s == "uniform") {
                w.skew = PartitionSkew{};
            } else if (s.starts_with("zipf(") && s.ends_with(")")) {
                const Field inner(std::string(section) + "." + std::string(key), std::string_view(s).substr(5, s.size() - 6), line);
                w.skew = PartitionSkew{PartitionSkew::Kind::Zipf, inner.number()};
            } else {
                f.fail("expected uniform or zipf(s), got '" + s + "'");
            }
        } else unknown();
    } else if (section == "servers") {
        ServerConfig& s = c.servers;
        if (key == "base_service_time") s.base_service_time = f.number();
        else if (key == "speed_factors") s.speed_factors = f.numbers();
        else if (key == "partitions") s.partitions = f.count32();
        else if (key == "placement") {
            const auto p = parse_placement(f.word());
            if (!p) f.fail("expected one_per_server, replicated_all or custom, got '" + f.word() + "'");
            s.placement = *p;
        } else if (key == "partition_map") s.partition_map = f.nested_indices();
        else if (key == "service_noise") s.service_noise = f.distribution();
        else unknown();
    } else if (section == "routing") {
        if (key == "policy") {
            const auto p = parse_policy(f.word());
            if (!p) f.fail("unknown policy '" + f.word() + "'");
            c.routing.kind = *p;
        } else if (key == "ewma_alpha") c.routing.ewma_alpha = f.number();
        else if (key == "flow_split") {
            const std::string v = f.word();
            if (v == "deterministic") c.routing.flow_split = FlowSplit::Deterministic;
            else if (v == "random") c.routing.flow_split = FlowSplit::Random;
            else f.fail("expected deterministic or random, got '" + v + "'");
        }
        else unknown();
    } else {
        f.fail("unknown section");
    }
}

std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

std::string list_text(const std::vector<double>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
    return out + "]";
}

std::string nested_text(const std::vector<std::vector<std::size_t>>& v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += i ? ", [" : "[";
        for (std::size_t j = 0; j < v[i].size(); ++j) out += (j ? ", " : "") + std::to_string(v[i][j]);
        out += "]";
    }
    return out + "]";
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ValidationError(field, what);
}

void require_dist(const DistributionSpec& d, const char* field) {
    const std::string problem = check(d);
    require(problem.empty(), field, problem);
}

// Smallest value the distribution can produce.
double lower_bound(const DistributionSpec& d) {
    if (const auto* c = std::get_if<Constant>(&d)) return c->value;
    if (const auto* u = std::get_if<Uniform>(&d)) return u->lo;
    if (const auto* i = std::get_if<UniformInt>(&d)) return static_cast<double>(i->lo);
    return 0.0;  // exponential: (0, inf)
}

std::string section_dump(const ScenarioConfig& c, bool with_output_dir) {
    std::ostringstream o;
    const auto& r = c.run;
    o << "[run]\n";
    o << "scenario_id = " << quoted(r.scenario_id) << "\n";
    o << "seed = " << r.seed << "\n";
    o << "max_events = " << r.max_events << "\n";
    o << "end_time = " << (std::isinf(r.end_time) ? "none" : format_number(r.end_time)) << "\n";
    o << "warmup = " << format_number(r.warmup) << "\n";
    o << "metric_interval = " << format_number(r.metric_interval) << "\n";
    o << "reservoir_size = " << r.reservoir_size << "\n";
    if (with_output_dir) o << "output_dir = " << quoted(r.output_dir) << "\n";

    const auto& p = c.topology.params;
    o << "\n[topology]\n";
    o << "lans = " << p.lans << "\n";
    o << "users_per_lan = " << p.users_per_lan << "\n";
    o << "lans_per_gateway = " << p.lans_per_gateway << "\n";
    o << "olap_servers = " << p.olap_servers << "\n";
    o << "rdbms_servers = " << p.rdbms_servers << "\n";
    o << "cloud_bandwidth = " << format_number(p.cloud_link.bandwidth_bps) << "\n";
    o << "cloud_latency = " << format_number(p.cloud_link.latency) << "\n";
    o << "extranet_bandwidth = " << format_number(p.extranet_link.bandwidth_bps) << "\n";
    o << "extranet_latency = " << format_number(p.extranet_link.latency) << "\n";
    const Topology topo = make_topology(c);
    const auto olaps = topo.olaps();
    for (std::size_t i = 0; i < olaps.size() && i < topo.flows.weights.size(); ++i) {
        o << "flow_weights." << topo.nodes()[olaps[i]].id << " = " << list_text(topo.flows.weights[i]) << "\n";
    }

    const auto& w = c.workload;
    o << "\n[workload]\n";
    o << "start_time = " << to_string(w.profile.start_time) << "\n";
    o << "start_offset = " << to_string(w.profile.start_offset) << "\n";
    o << "inter_repetition = " << to_string(w.profile.inter_repetition) << "\n";
    o << "repetitions = "
      << (w.profile.unlimited_repetitions ? std::string("unlimited") : std::to_string(w.profile.max_repetitions))
      << "\n";
    o << "repetition_pattern = concurrent\n";
    o << "session_mode = " << (w.profile.mode == SessionMode::AlwaysOn ? "always_on" : "on_off") << "\n";
    o << "on_duration = " << to_string(w.profile.on_duration) << "\n";
    o << "duty_cycle = " << (w.duty_cycle ? format_number(*w.duty_cycle) : std::string("auto")) << "\n";
    o << "target_aggregate = " << format_number(w.target_aggregate) << "\n";
    o << "objects_per_page = " << to_string(w.page.objects_per_page) << "\n";
    o << "object_size = " << to_string(w.page.object_size) << "\n";
    o << "object_refresh = " << format_number(w.page.object_refresh) << "\n";
    o << "page_refresh = " << format_number(w.page.page_refresh) << "\n";
    o << "query_mix = " << format_number(w.transactions.query_mix) << "\n";
    o << "interarrival = " << to_string(w.transactions.interarrival) << "\n";
    o << "size = " << to_string(w.transactions.size) << "\n";
    o << "partition_skew = " << to_string(w.skew) << "\n";

    const auto& s = c.servers;
    o << "\n[servers]\n";
    o << "base_service_time = " << format_number(s.base_service_time) << "\n";
    o << "speed_factors = " << list_text(s.speeds(p.rdbms_servers)) << "\n";
    o << "partitions = " << resolved_partitions(c) << "\n";
    o << "placement = " << to_string(s.placement) << "\n";
    if (s.placement == Placement::Custom) o << "partition_map = " << nested_text(s.partition_map) << "\n";
    o << "service_noise = " << to_string(s.service_noise) << "\n";

    o << "\n[routing]\n";
    o << "policy = " << to_string(c.routing.kind) << "\n";
    o << "ewma_alpha = " << format_number(c.routing.ewma_alpha) << "\n";
    o << "flow_split = " << to_string(c.routing.flow_split) << "\n";
    return o.str();
}

}  // namespace

std::uint32_t resolved_partitions(const ScenarioConfig& c) noexcept {
    return c.servers.partitions ? c.servers.partitions : c.topology.params.rdbms_servers;
}

Topology make_topology(const ScenarioConfig& c) {
    Topology t = build_topology(c.topology.params);
    if (c.topology.flow_weights) {
        for (auto& row : t.flows.weights) row = *c.topology.flow_weights;
    }
    const auto olaps = t.olaps();
    for (const auto& [id, row] : c.topology.flow_rows) {
        for (std::size_t i = 0; i < olaps.size(); ++i) {
            if (t.nodes()[olaps[i]].id == id) t.flows.weights[i] = row;
        }
    }
    return t;
}

PartitionMap make_partition_map(const ScenarioConfig& c) {
    return make_partition_map(c.servers.placement, c.topology.params.rdbms_servers, resolved_partitions(c),
                              c.servers.partition_map);
}

ScenarioConfig parse_scenario(std::string_view text) {
    ScenarioConfig config;
    std::string section;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const std::string_view line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            bool known = false;
            for (auto s : kSections) known = known || s == section;
            if (!known) throw ParseError(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        if (section.empty()) throw ParseError(line_no, "key outside of any [section]");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "missing key before '='");
        if (value.empty()) throw ParseError(line_no, "missing value for '" + key + "'");
        int depth = 0;
        for (char ch : value) {
            if (ch == '[' || ch == '(') ++depth;
            if (ch == ']' || ch == ')') --depth;
            if (depth < 0) break;
        }
        if (depth != 0) throw ParseError(line_no, "unbalanced brackets in value of '" + key + "'");
        if (!seen.insert(section + "." + key).second) {
            throw ValidationError(section + "." + key, "duplicate key (line " + std::to_string(line_no) + ")");
        }
        set_field(config, section, key, value, line_no);
    }
    validate(config);
    return config;
}

void apply_override(ScenarioConfig& config, std::string_view field, std::string_view value) {
    const auto dot = field.find('.');
    if (dot == std::string_view::npos) throw ValidationError(std::string(field), "expected section.key");
    set_field(config, field.substr(0, dot), field.substr(dot + 1), value, 0);
}

void validate(const ScenarioConfig& c) {
    const auto& r = c.run;
    require(!r.scenario_id.empty(), "run.scenario_id", "must not be empty");
    require(r.scenario_id.find_first_of("/\\") == std::string::npos, "run.scenario_id", "must not contain path separators");
    require(r.max_events >= 1, "run.max_events", "must be >= 1");
    require(r.end_time > 0.0, "run.end_time", "must be > 0 or none");
    require(r.warmup >= 0.0 && std::isfinite(r.warmup), "run.warmup", "must be >= 0");
    require(r.metric_interval > 0.0 && std::isfinite(r.metric_interval), "run.metric_interval", "must be > 0");
    require(r.reservoir_size >= 1, "run.reservoir_size", "must be >= 1");

    const auto& p = c.topology.params;
    require(p.lans >= 1, "topology.lans", "must be >= 1");
    require(p.users_per_lan >= 1, "topology.users_per_lan", "must be >= 1");
    require(p.lans_per_gateway >= 1, "topology.lans_per_gateway", "must be >= 1");
    require(p.olap_servers >= 1, "topology.olap_servers", "must be >= 1");
    require(p.rdbms_servers >= 1, "topology.rdbms_servers", "must be >= 1");
    require(p.cloud_link.bandwidth_bps > 0.0, "topology.cloud_bandwidth", "must be > 0");
    require(p.cloud_link.latency >= 0.0, "topology.cloud_latency", "must be >= 0");
    require(p.extranet_link.bandwidth_bps > 0.0, "topology.extranet_bandwidth", "must be > 0");
    require(p.extranet_link.latency >= 0.0, "topology.extranet_latency", "must be >= 0");
    for (const auto& [id, row] : c.topology.flow_rows) {
        require(id.starts_with("olap_"), "topology.flow_weights", "override names unknown OLAP server '" + id + "'");
    }
    const Topology topo = make_topology(c);
    for (const auto& [id, row] : c.topology.flow_rows) {
        const auto node = topo.find(id);
        require(node && topo.nodes()[*node].kind == NodeKind::OlapServer, "topology.flow_weights",
                "override names unknown OLAP server '" + id + "'");
    }
    const auto problems = validate(topo);
    if (!problems.empty()) {
        std::string joined;
        for (const auto& msg : problems) joined += (joined.empty() ? "" : "; ") + msg;
        throw ValidationError("topology.flow_weights", joined);
    }

    const auto& w = c.workload;
    require_dist(w.profile.start_time, "workload.start_time");
    require_dist(w.profile.start_offset, "workload.start_offset");
    require_dist(w.profile.inter_repetition, "workload.inter_repetition");
    require(mean(w.profile.inter_repetition) > 0.0, "workload.inter_repetition", "mean must be > 0");
    require_dist(w.profile.on_duration, "workload.on_duration");
    require(mean(w.profile.on_duration) > 0.0, "workload.on_duration", "mean must be > 0");
    require_dist(w.page.objects_per_page, "workload.objects_per_page");
    require(lower_bound(w.page.objects_per_page) >= 0.0, "workload.objects_per_page", "must be >= 0");
    require_dist(w.page.object_size, "workload.object_size");
    require(w.page.object_refresh > 0.0, "workload.object_refresh", "must be > 0");
    require(w.page.page_refresh > 0.0, "workload.page_refresh", "must be > 0");
    {
        const double ratio = w.page.page_refresh / w.page.object_refresh;
        require(std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1.0, "workload.object_refresh",
                "must divide page_refresh");
    }
    require(w.transactions.query_mix > 0.0 && w.transactions.query_mix <= 1.0, "workload.query_mix",
            "must be in (0, 1]");
    require_dist(w.transactions.interarrival, "workload.interarrival");
    require(mean(w.transactions.interarrival) > 0.0, "workload.interarrival", "mean must be > 0");
    require_dist(w.transactions.size, "workload.size");
    require(lower_bound(w.transactions.size) > 0.0 || std::holds_alternative<Exponential>(w.transactions.size),
            "workload.size", "query sizes must be > 0");
    if (w.skew.kind == PartitionSkew::Kind::Zipf) {
        require(w.skew.exponent >= 0.0 && std::isfinite(w.skew.exponent), "workload.partition_skew",
                "zipf exponent must be >= 0");
    }
    if (w.duty_cycle) {
        require(*w.duty_cycle > 0.0 && *w.duty_cycle <= 1.0, "workload.duty_cycle", "must be in (0, 1]");
    } else {
        require(w.target_aggregate > 0.0 && std::isfinite(w.target_aggregate), "workload.target_aggregate",
                "must be > 0");
        try {
            (void)calibrate_duty_cycle(w.target_aggregate, topo.total_users(), w.transactions);
        } catch (const Infeasible& e) {
            throw ValidationError("workload.target_aggregate", e.what());
        }
    }

    const auto& s = c.servers;
    require(s.base_service_time > 0.0 && std::isfinite(s.base_service_time), "servers.base_service_time",
            "must be > 0");
    if (!s.speed_factors.empty()) {
        require(s.speed_factors.size() == p.rdbms_servers, "servers.speed_factors",
                "has " + std::to_string(s.speed_factors.size()) + " entries for " + std::to_string(p.rdbms_servers) +
                    " RDBMS servers");
        for (double f : s.speed_factors) require(f > 0.0 && std::isfinite(f), "servers.speed_factors", "must be > 0");
    }
    require_dist(s.service_noise, "servers.service_noise");
    require(mean(s.service_noise) > 0.0, "servers.service_noise", "mean must be > 0");
    const std::uint32_t partitions = resolved_partitions(c);
    if (s.placement == Placement::Custom) {
        require(s.partition_map.size() == partitions, "servers.partition_map",
                "lists " + std::to_string(s.partition_map.size()) + " partitions, expected " +
                    std::to_string(partitions));
    }
    PartitionMap map;
    try {
        map = make_partition_map(c);
    } catch (const ShapeMismatch& e) {
        throw ValidationError("servers.placement", e.what());
    }
    const auto map_problems = validate(map, p.rdbms_servers);
    if (!map_problems.empty()) throw ValidationError("servers.partition_map", map_problems.front());

    require(c.routing.ewma_alpha > 0.0 && c.routing.ewma_alpha <= 1.0, "routing.ewma_alpha", "must be in (0, 1]");
    if (c.routing.kind == PolicyKind::FlowWeighted) {
        for (std::size_t o = 0; o < topo.flows.weights.size(); ++o) {
            for (std::size_t part = 0; part < map.hosts.size(); ++part) {
                double total = 0.0;
                for (std::size_t h : map.hosts[part]) total += topo.flows.weights[o][h];
                require(total > 0.0, "topology.flow_weights",
                        "olap_" + std::to_string(o + 1) + " has zero weight on every host of partition " +
                            std::to_string(part));
            }
        }
    }
}

std::string dump(const ScenarioConfig& config) { return section_dump(config, true); }

std::uint64_t config_hash(const ScenarioConfig& config) { return fnv1a(section_dump(config, false)); }

}  // namespace olapsim
