#pragma once

#include "sade/engine.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sade {

enum class ExperimentKind : std::uint8_t {
    single,
    scale_sweep,
    density_sweep,
    het_density,
    power_sweep,
    convergence,
    impossibility,
    epsilon_sweep,
    baseline_compare,
};

const char* experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::single;
    std::string out_dir = "out";
    std::uint64_t seed_base = 1;
    std::uint32_t num_seeds = 10;
    bool emit_traces = false;
    std::vector<std::uint32_t> sweep_n = {250, 500, 1000, 2000};
    std::vector<double> sweep_alpha = {3.0, 4.0};
    std::vector<double> sweep_power = {2.0, 4.0, 8.0, 16.0};
    std::vector<double> sweep_epsilon = {0.05, 0.1, 0.2, 1.0 / 3.0, 0.5};

    std::vector<std::uint64_t> seeds() const;

    void validate() const {
        if (num_seeds < 1)
            throw ConfigError("num_seeds: must be >= 1");
    }
};

// How the adversary budget B is derived when not given explicitly:
// (1-eps)*theta is the bound under which the throughput guarantees hold;
// (1-eps)*beta is kept available as an alternative reading.
enum class BudgetRule : std::uint8_t { from_theta, from_beta, explicit_value };

struct LoadedConfig {
    SimConfig sim;
    ExperimentSpec experiment;
    BudgetRule budget_rule = BudgetRule::from_theta;

    // Re-derives dependent values (adversary epsilon, auto budget).
    void finalize();
};

LoadedConfig default_config();

// Key-value configuration: one `key = value` per line, '#' comments.
// Unknown keys are errors. Omitted keys keep their defaults.
LoadedConfig parse_config(std::istream& in);
LoadedConfig load_config(const std::string& path);

// Applies a single override (the CLI's --set and named flags route here).
void apply_key(LoadedConfig& cfg, const std::string& key, const std::string& value);

// Emits every effective key so that reloading reproduces the identical run.
void write_effective_config(const LoadedConfig& cfg, std::ostream& out);

} // namespace sade
