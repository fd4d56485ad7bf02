#include "olapsim/oracle.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "olapsim/runner.hpp"

namespace olapsim {

namespace {

ScenarioConfig single_server_base(const char* id) {
    ScenarioConfig c;
    c.run.scenario_id = id;
    c.topology.params.lans = 1;
    c.topology.params.lans_per_gateway = 1;
    c.topology.params.olap_servers = 1;
    c.topology.params.rdbms_servers = 1;
    c.workload.duty_cycle = 1.0;
    return c;
}

}  // namespace

ScenarioConfig dd1_scenario() {
    ScenarioConfig c = single_server_base("oracle_dd1");
    c.topology.params.users_per_lan = 1;
    c.run.end_time = 600.0;
    c.run.warmup = 0.0;
    return c;
}

ScenarioConfig md1_scenario() {
    ScenarioConfig c = single_server_base("oracle_md1");
    c.topology.params.users_per_lan = 200;
    c.workload.transactions.interarrival = Exponential{8.0};
    c.run.end_time = 20000.0;
    c.run.warmup = 100.0;
    return c;
}

OracleCheck check_dd1(const ScenarioConfig& config) {
    OracleCheck check;
    check.name = "D/D/1 zero wait";
    const auto t0 = std::chrono::steady_clock::now();
    const RunManifest m = run_scenario(config, RunOptions{false, false});
    check.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const ServerSeries& s = m.result.series->server(0);
    check.measured = s.max_wait;
    check.expected = 0.0;
    check.passed = m.result.counters.completed > 1 && s.positive_waits == 0 && s.max_wait == 0.0;
    std::ostringstream d;
    d << m.result.counters.completed << " queries, " << s.positive_waits << " waited, max wait " << s.max_wait << " s";
    check.detail = d.str();
    return check;
}

OracleCheck check_md1(const ScenarioConfig& config) {
    OracleCheck check;
    check.name = "M/D/1 mean wait";
    const auto t0 = std::chrono::steady_clock::now();
    const RunManifest m = run_scenario(config, RunOptions{false, false});
    check.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double users = static_cast<double>(config.topology.params.lans) * config.topology.params.users_per_lan;
    const double lambda = users * m.result.duty_cycle * config.workload.transactions.query_mix /
                          mean(config.workload.transactions.interarrival);
    const double service = config.servers.base_service_time * (mean(config.workload.transactions.size) / 10240.0);
    check.expected = mdl_wait_oracle(lambda, service);
    check.measured = m.result.summary.mean_wait;
    const double rel = std::abs(check.measured - check.expected) / check.expected;
    check.passed = rel <= 0.10;
    std::ostringstream d;
    d << "lambda " << lambda << " q/s, rho " << lambda * service << ", relative error " << rel;
    check.detail = d.str();
    return check;
}

std::vector<OracleCheck> run_oracles() { return {check_dd1(), check_md1()}; }

}  // namespace olapsim
