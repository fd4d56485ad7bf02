// olapsim: scenario-driven batch runner for the OLAP/RDBMS array simulator.
//
//   olapsim [scenario.ini] [--seed N] [--max-events N] [--end-time T]
//           [--policy P] [--output DIR] [--set section.key=value]...
//   olapsim scenario.ini --axis routing.policy=flow_weighted|response_time_weighted [--jobs N]
//   olapsim --oracle
//   olapsim scenario.ini --dump-config
//
// Exit codes: 0 ok, 1 other failure, 2 parse error, 3 validation error,
// 4 runtime invariant breach.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include "olapsim/errors.hpp"
#include "olapsim/oracle.hpp"
#include "olapsim/runner.hpp"
#include "olapsim/scenario.hpp"
#include "olapsim/sweep.hpp"

namespace {

using namespace olapsim;

struct Flags {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> max_events;
    std::optional<std::string> end_time;
    std::optional<std::string> policy;
    std::optional<std::string> output;
    std::vector<std::string> sets;
    std::vector<std::string> axes;
    int jobs = 1;
    bool oracle = false;
    bool dump_config = false;
    bool no_svg = false;
};

ScenarioConfig load(const Flags& f) {
    std::string text;
    if (!f.scenario.empty()) {
        std::ifstream in(f.scenario, std::ios::binary);
        if (!in) throw std::runtime_error("cannot read scenario file " + f.scenario);
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    ScenarioConfig c = parse_scenario(text);
    for (const auto& s : f.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ValidationError(s, "--set expects section.key=value");
        apply_override(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (f.seed) c.run.seed = *f.seed;
    if (f.max_events) c.run.max_events = *f.max_events;
    if (f.end_time) apply_override(c, "run.end_time", *f.end_time);
    if (f.policy) apply_override(c, "routing.policy", *f.policy);
    if (f.output) c.run.output_dir = *f.output;
    validate(c);
    return c;
}

void print_summary(const RunManifest& m) {
    const auto& s = m.result.summary;
    std::cout << "scenario " << m.scenario_id << "  config " << hex64(m.config_hash) << "  seed " << m.seed << "\n"
              << "events " << m.events.events << " (" << to_string(m.events.reason) << "), virtual time "
              << m.events.final_time << " s, wall " << m.wall_clock_s << " s\n"
              << "sessions " << m.result.sessions << " (duty cycle " << m.result.duty_cycle << ")\n"
              << "window [" << s.window_start << ", " << s.window_end << ") s\n";
    for (const auto& ss : s.servers) {
        std::cout << "  server_" << ss.server + 1 << "  " << ss.rate << " q/s  mean " << ss.mean_processing
                  << " s  p95 " << ss.p95_processing << " s  util " << ss.utilization << "\n";
    }
    if (s.servers.size() >= 2 && s.mean_arrivals > 0.0) std::cout << "evenness CV " << evenness(s) << "\n";
}

int run_oracle_mode() {
    bool all = true;
    for (const auto& check : run_oracles()) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << ": measured " << check.measured
                  << ", expected " << check.expected << " (" << check.detail << ", " << check.wall_clock_s
                  << " s)\n";
        all = all && check.passed;
    }
    return all ? kExitOk : kExitFailure;
}

int run_sweep_mode(const ScenarioConfig& base, const Flags& f) {
    std::vector<SweepAxis> axes;
    for (const auto& a : f.axes) axes.push_back(parse_axis(a));
    const auto cases = expand(base, axes);
    SweepOptions options;
    options.threads = std::max(1, f.jobs);
    options.run.write_svg = !f.no_svg;
    const auto rows = run_sweep(cases, options);

    const auto dir = output_dir_for(base);
    std::filesystem::create_directories(dir);
    const auto table = comparison_csv(axes, rows);
    std::ofstream out(dir / "comparison.csv", std::ios::binary | std::ios::trunc);
    out << table;
    if (!out) throw std::runtime_error("failed writing " + (dir / "comparison.csv").string());
    std::cout << table;

    int code = kExitOk;
    for (const auto& r : rows) code = std::max(code, r.exit_code);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-event simulator for OLAP servers driving a partitioned RDBMS array"};
    Flags f;
    app.add_option("scenario", f.scenario, "Scenario file (omit for the reference scenario)");
    app.add_option("--seed", f.seed, "Override run.seed");
    app.add_option("--max-events", f.max_events, "Override run.max_events");
    app.add_option("--end-time", f.end_time, "Override run.end_time (seconds or 'none')");
    app.add_option("--policy", f.policy,
                   "Override routing.policy (flow_weighted, round_robin, least_outstanding, response_time_weighted)");
    app.add_option("--output", f.output, "Output directory (default $OLAPSIM_OUTPUT_ROOT/<scenario_id>)");
    app.add_option("--set", f.sets, "Override any field: section.key=value (repeatable)");
    app.add_option("--axis", f.axes, "Sweep axis section.key=v1|v2|... (repeatable; enables sweep mode)");
    app.add_option("--jobs", f.jobs, "Concurrent runs in sweep mode")->check(CLI::PositiveNumber);
    app.add_flag("--oracle", f.oracle, "Run the D/D/1 and M/D/1 validation scenarios and report pass/fail");
    app.add_flag("--dump-config", f.dump_config, "Print the resolved scenario and exit");
    app.add_flag("--no-svg", f.no_svg, "Skip SVG charts");
    CLI11_PARSE(app, argc, argv);

    try {
        if (f.oracle) return run_oracle_mode();
        const ScenarioConfig config = load(f);
        if (f.dump_config) {
            std::cout << dump(config);
            return kExitOk;
        }
        if (!f.axes.empty()) return run_sweep_mode(config, f);

        RunOptions options;
        options.write_svg = !f.no_svg;
        const RunManifest m = run_scenario(config, options);
        print_summary(m);
        std::cout << "outputs in " << output_dir_for(config).string() << "\n";
        return kExitOk;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitParse;
    } catch (const ValidationError& e) {
        std::cerr << "invalid scenario: " << e.what() << "\n";
        return kExitValidation;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return kExitInvariant;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}
