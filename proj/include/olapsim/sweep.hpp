#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "olapsim/runner.hpp"
#include "olapsim/scenario.hpp"

namespace olapsim {

/// One swept field: "section.key" and the value texts to try.
struct SweepAxis {
    std::string field;
    std::vector<std::string> values;
};

/// Parses "routing.policy=flow_weighted|response_time_weighted".
/// Values are separated by '|' so that lists like [1, 0.5] stay intact.
[[nodiscard]] SweepAxis parse_axis(std::string_view spec);

struct SweepCase {
    std::string id;
    std::vector<std::string> values;  // one per axis
    ScenarioConfig config;
};

/// Cartesian product of `axes` over `base`, first axis varying slowest.
/// Each case writes under <base output dir>/<case id>. Invalid combinations
/// throw ValidationError.
[[nodiscard]] std::vector<SweepCase> expand(const ScenarioConfig& base, const std::vector<SweepAxis>& axes);

struct SweepRow {
    std::string id;
    std::vector<std::string> values;
    int exit_code = kExitOk;
    std::string error;
    double cv = 0.0;
    double mean_wait = 0.0;
    double mean_processing = 0.0;
    double p95_processing = 0.0;
    double utilization_min = 0.0;
    double utilization_max = 0.0;
    std::string manifest;  // reproducible manifest JSON (no wall clock)
};

struct SweepOptions {
    int threads = 1;
    RunOptions run;
};

/// Runs each case one after the other. Reference path for run_sweep.
[[nodiscard]] std::vector<SweepRow> run_sweep_serial(const std::vector<SweepCase>& cases, const SweepOptions& options);

/// Runs cases concurrently with OpenMP (share-nothing; one simulation per
/// thread at a time). Rows come back in case order regardless of scheduling.
[[nodiscard]] std::vector<SweepRow> run_sweep(const std::vector<SweepCase>& cases, const SweepOptions& options);

/// scenario_id, one column per axis, status, cv, mean_wait_s, ... ; rows in case order.
[[nodiscard]] std::string comparison_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows);

}  // namespace olapsim
