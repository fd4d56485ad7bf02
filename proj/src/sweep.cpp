#include "olapsim/sweep.hpp"

#include <omp.h>

#include <stdexcept>

#include "olapsim/errors.hpp"
#include "olapsim/text.hpp"

namespace olapsim {

SweepAxis parse_axis(std::string_view spec) {
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos) throw ValidationError(std::string(spec), "axis must look like section.key=v1|v2");
    SweepAxis axis;
    axis.field = std::string(trim(spec.substr(0, eq)));
    std::string_view rest = spec.substr(eq + 1);
    for (;;) {
        const auto bar = rest.find('|');
        const auto item = trim(rest.substr(0, bar));
        if (item.empty()) throw ValidationError(axis.field, "empty value in sweep axis");
        axis.values.emplace_back(item);
        if (bar == std::string_view::npos) break;
        rest = rest.substr(bar + 1);
    }
    return axis;
}

std::vector<SweepCase> expand(const ScenarioConfig& base, const std::vector<SweepAxis>& axes) {
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.values.size();
    const auto root = output_dir_for(base);

    std::vector<SweepCase> cases;
    for (std::size_t n = 0; n < total; ++n) {
        SweepCase c;
        c.config = base;
        std::size_t rem = n;
        std::vector<std::size_t> pick(axes.size());
        for (std::size_t i = axes.size(); i-- > 0;) {
            pick[i] = rem % axes[i].values.size();
            rem /= axes[i].values.size();
        }
        for (std::size_t i = 0; i < axes.size(); ++i) {
            c.values.push_back(axes[i].values[pick[i]]);
            apply_override(c.config, axes[i].field, c.values.back());
        }
        char id[32];
        std::snprintf(id, sizeof id, "case_%03zu", n);
        c.id = base.run.scenario_id + "_" + id;
        c.config.run.scenario_id = c.id;
        c.config.run.output_dir = (root / c.id).string();
        validate(c.config);
        cases.push_back(std::move(c));
    }
    return cases;
}

namespace {

SweepRow run_case(const SweepCase& c, const SweepOptions& options) {
    SweepRow row;
    row.id = c.id;
    row.values = c.values;
    try {
        const RunManifest m = run_scenario(c.config, options.run);
        const auto& s = m.result.summary;
        row.cv = s.servers.size() >= 2 && s.mean_arrivals > 0.0 ? evenness(s) : 0.0;
        row.mean_wait = s.mean_wait;
        row.mean_processing = s.mean_processing;
        row.p95_processing = s.p95_processing;
        row.utilization_min = s.utilization_min;
        row.utilization_max = s.utilization_max;
        row.manifest = m.to_json(false);
    } catch (const ValidationError& e) {
        row.exit_code = kExitValidation;
        row.error = e.what();
    } catch (const InvariantViolation& e) {
        row.exit_code = kExitInvariant;
        row.error = e.what();
    } catch (const std::exception& e) {
        row.exit_code = kExitFailure;
        row.error = e.what();
    }
    return row;
}

std::string csv_cell(std::string s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch == '\n' ? ' ' : ch;
    }
    return out + "\"";
}

}  // namespace

std::vector<SweepRow> run_sweep_serial(const std::vector<SweepCase>& cases, const SweepOptions& options) {
    std::vector<SweepRow> rows;
    rows.reserve(cases.size());
    for (const auto& c : cases) rows.push_back(run_case(c, options));
    return rows;
}

std::vector<SweepRow> run_sweep(const std::vector<SweepCase>& cases, const SweepOptions& options) {
    if (options.threads <= 1 || cases.size() <= 1) return run_sweep_serial(cases, options);
    std::vector<SweepRow> rows(cases.size());
    const auto n = static_cast<long>(cases.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(options.threads)
    for (long i = 0; i < n; ++i) {
        rows[static_cast<std::size_t>(i)] = run_case(cases[static_cast<std::size_t>(i)], options);
    }
    return rows;
}

std::string comparison_csv(const std::vector<SweepAxis>& axes, const std::vector<SweepRow>& rows) {
    std::string out = "scenario_id";
    for (const auto& a : axes) out += "," + csv_cell(a.field);
    out += ",status,exit_code,cv,mean_wait_s,mean_processing_s,p95_processing_s,utilization_min,utilization_max,"
           "utilization_spread\n";
    for (const auto& r : rows) {
        out += csv_cell(r.id);
        for (const auto& v : r.values) out += "," + csv_cell(v);
        out += "," + csv_cell(r.exit_code == kExitOk ? std::string("ok") : "error: " + r.error);
        out += "," + std::to_string(r.exit_code);
        for (double v : {r.cv, r.mean_wait, r.mean_processing, r.p95_processing, r.utilization_min, r.utilization_max,
                         r.utilization_max - r.utilization_min}) {
            out += "," + format_number(v);
        }
        out += "\n";
    }
    return out;
}

}  // namespace olapsim
