#pragma once

#include <string>
#include <vector>

#include "olapsim/scenario.hpp"

namespace olapsim {

/// Outcome of a queueing-theory validation run.
struct OracleCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double expected = 0.0;
    std::string detail;
    double wall_clock_s = 0.0;
};

/// One always-on session with constant 1 s interarrival feeding a single
/// RDBMS server (D/D/1, rho = base_service_time).
[[nodiscard]] ScenarioConfig dd1_scenario();

/// 200 sessions with exponential(8 s) interarrival feeding one server:
/// Poisson arrivals at 25 q/s, deterministic 20 ms service, rho = 0.5.
[[nodiscard]] ScenarioConfig md1_scenario();

/// Every query after the first waits exactly zero.
[[nodiscard]] OracleCheck check_dd1(const ScenarioConfig& config = dd1_scenario());
/// Mean wait within 10% of the M/D/1 closed form.
[[nodiscard]] OracleCheck check_md1(const ScenarioConfig& config = md1_scenario());

[[nodiscard]] std::vector<OracleCheck> run_oracles();

}  // namespace olapsim
