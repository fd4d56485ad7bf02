#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "olapsim/scenario.hpp"
#include "olapsim/simulation.hpp"

namespace olapsim {

/// Process exit codes of the command-line runner.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitParse = 2,
    kExitValidation = 3,
    kExitInvariant = 4,
};

struct RunManifest {
    std::string scenario_id;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::string tool_version;
    RunSummary events;
    double wall_clock_s = 0.0;
    SimulationResult result;

    /// JSON text. `include_wall_clock` = false gives the reproducible part.
    [[nodiscard]] std::string to_json(bool include_wall_clock = true) const;
};

struct RunOptions {
    bool write_outputs = true;
    bool write_svg = true;
};

/// $OLAPSIM_OUTPUT_ROOT or "olapsim_out".
[[nodiscard]] std::filesystem::path default_output_root();
/// run.output_dir if set, otherwise default_output_root() / scenario_id.
[[nodiscard]] std::filesystem::path output_dir_for(const ScenarioConfig& config);

/// Runs one scenario and, unless disabled, writes arrivals/processing/
/// utilization CSV (and SVG) files, the resolved scenario and manifest.json
/// (atomically, last) into output_dir_for(config).
RunManifest run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Hex form used for config and trace hashes.
[[nodiscard]] std::string hex64(std::uint64_t value);

}  // namespace olapsim
