#include "olapsim/runner.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace olapsim {

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

std::filesystem::path default_output_root() {
    const char* root = std::getenv("OLAPSIM_OUTPUT_ROOT");
    return root && *root ? std::filesystem::path(root) : std::filesystem::path("olapsim_out");
}

std::filesystem::path output_dir_for(const ScenarioConfig& config) {
    if (!config.run.output_dir.empty()) return config.run.output_dir;
    return default_output_root() / config.run.scenario_id;
}

std::string RunManifest::to_json(bool include_wall_clock) const {
    using nlohmann::ordered_json;
    ordered_json j;
    j["scenario_id"] = scenario_id;
    j["config_hash"] = hex64(config_hash);
    j["seed"] = seed;
    j["tool_version"] = tool_version;

    ordered_json ev;
    ev["total"] = events.events;
    ordered_json kinds = ordered_json::object();
    for (std::size_t k = 0; k < kEventKindCount; ++k) {
        kinds[std::string(to_string(static_cast<EventKind>(k)))] = events.per_kind[k];
    }
    ev["per_kind"] = kinds;
    ev["stop_reason"] = std::string(to_string(events.reason));
    j["events"] = ev;
    if (include_wall_clock) j["wall_clock_s"] = wall_clock_s;
    j["final_time_s"] = events.final_time;

    const auto& c = result.counters;
    j["queries"] = {{"created", c.created},     {"dispatched", c.dispatched}, {"completed", c.completed},
                    {"pending", c.pending},     {"in_flight", c.in_flight},   {"in_system", c.in_system},
                    {"non_query", c.non_query}};
    j["sessions"] = result.sessions;
    j["duty_cycle"] = result.duty_cycle;
    j["http_bytes"] = result.http_bytes;
    j["trace_hash"] = hex64(result.trace_hash);

    const auto& s = result.summary;
    ordered_json summary;
    summary["window_start_s"] = s.window_start;
    summary["window_end_s"] = s.window_end;
    ordered_json servers = ordered_json::array();
    for (const auto& ss : s.servers) {
        servers.push_back({{"server", "server_" + std::to_string(ss.server + 1)},
                           {"arrivals", ss.arrivals},
                           {"rate_qps", ss.rate},
                           {"completions", ss.completions},
                           {"mean_processing_s", ss.mean_processing},
                           {"mean_wait_s", ss.mean_wait},
                           {"p95_processing_s", ss.p95_processing},
                           {"utilization", ss.utilization}});
    }
    summary["servers"] = servers;
    summary["mean_arrivals"] = s.mean_arrivals;
    summary["stddev_arrivals"] = s.stddev_arrivals;
    summary["cv"] = s.mean_arrivals > 0.0 && s.servers.size() >= 2 ? ordered_json(evenness(s)) : ordered_json(nullptr);
    summary["mean_processing_s"] = s.mean_processing;
    summary["mean_wait_s"] = s.mean_wait;
    summary["p95_processing_s"] = s.p95_processing;
    summary["utilization_min"] = s.utilization_min;
    summary["utilization_max"] = s.utilization_max;
    j["summary"] = summary;
    return j.dump(2) + "\n";
}

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& body) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << body;
        out.close();
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

}  // namespace

RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    validate(config);
    const auto started = std::chrono::steady_clock::now();
    Simulation sim(config);
    SimulationResult result = sim.run();
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    RunManifest m;
    m.scenario_id = config.run.scenario_id;
    m.config_hash = config_hash(config);
    m.seed = config.run.seed;
    m.tool_version = std::string(kToolVersion);
    m.events = result.run;
    m.wall_clock_s = elapsed;
    m.result = std::move(result);

    if (options.write_outputs) {
        const auto dir = output_dir_for(config);
        export_series(*m.result.series, ExportFormat::Csv, dir);
        if (options.write_svg) export_series(*m.result.series, ExportFormat::Svg, dir);
        write_atomically(dir / "scenario.resolved.ini", dump(config));
        write_atomically(dir / "manifest.json", m.to_json());
    }
    return m;
}

}  // namespace olapsim
