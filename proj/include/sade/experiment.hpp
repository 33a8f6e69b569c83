#pragma once

#include "sade/config.hpp"
#include "sade/engine.hpp"

#include <string>
#include <vector>

namespace sade {

// One (cell, seed) outcome of an experiment grid.
struct RunRow {
    std::string cell;
    double param = 0.0; // primary x value of the cell (n, density, power, eps)
    std::string protocol = "sade";
    std::uint64_t seed = 0;
    double throughput = 0.0;
    std::uint32_t excluded_nodes = 0;
    double competitive = 0.0;
    bool vacuous = false;
    std::uint64_t receptions = 0;
    std::uint64_t trace_hash = 0;
    std::uint64_t noise_hash = 0;
    bool ok = false;
    std::string error;
};

struct CellSummary {
    std::string cell;
    double param = 0.0;
    std::string protocol;
    std::uint32_t num_seeds = 0;
    double mean_throughput = 0.0;
    double stddev_throughput = 0.0;
    double mean_competitive = 0.0;
    double min_throughput = 0.0;
    double max_throughput = 0.0;
};

struct ExperimentResult {
    ExperimentKind kind = ExperimentKind::single;
    std::string dir; // out/<experiment>
    std::vector<RunRow> rows;
    std::vector<CellSummary> summaries;
    bool all_ok = false;
    bool pairing_ok = true; // baseline_compare: jam schedules matched per seed
};

// Executes the configured experiment grid over its seeds and writes
// runs.csv, summary.csv, manifest.json and any per-run artifacts under
// <out>/<experiment>/. Failures of single cells are recorded in the
// manifest instead of aborting the whole grid.
ExperimentResult run_experiment(const LoadedConfig& cfg);

// SADE vs. the backoff baseline on identical topologies and jam schedules,
// per epsilon. Equivalent to the baseline_compare experiment.
ExperimentResult compare_protocols(const LoadedConfig& cfg);

// Two nodes exactly R1 apart under a constant jammer at 1.1*theta: the
// regression scenario in which any protocol's throughput is zero.
SimConfig impossibility_config(const SimConfig& base);

CellSummary summarize_cell(const std::string& cell, double param, const std::string& protocol,
                           std::span<const RunRow> rows);

} // namespace sade
