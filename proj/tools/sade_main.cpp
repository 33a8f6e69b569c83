#include "sade/acceptance.hpp"
#include "sade/config.hpp"
#include "sade/engine.hpp"
#include "sade/experiment.hpp"
#include "sade/metrics.hpp"
#include "sade/trace_io.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRun = 3;
constexpr int kExitAcceptance = 4;

struct Overrides {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> kvs;

    sade::LoadedConfig load() const {
        sade::LoadedConfig cfg =
            config_path.empty() ? sade::default_config() : sade::load_config(config_path);
        for (const auto& [key, value] : kvs)
            sade::apply_key(cfg, key, value);
        cfg.finalize();
        cfg.sim.validate();
        cfg.experiment.validate();
        return cfg;
    }
};

void add_common(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "key=value configuration file");
    auto track = [&ov](const std::string& key) {
        return [&ov, key](const std::string& value) { ov.kvs.emplace_back(key, value); };
    };
    for (const char* key : {"alpha", "beta", "theta", "power", "epsilon", "seed", "rounds",
                            "jammer", "protocol", "gamma", "p_hat", "n", "scenario", "budget",
                            "window", "jammer_level", "num_seeds", "out", "width", "height"}) {
        cmd->add_option_function<std::string>(std::string("--") + key, track(key),
                                              std::string("override config key ") + key);
    }
    cmd->add_option("--set", "override any config key (key=value, repeatable)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->each([&ov](const std::string& kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("--set expects key=value");
            ov.kvs.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        });
}

void set_workers(int workers) {
#ifdef _OPENMP
    if (workers <= 0) {
        if (const char* env = std::getenv("SADE_WORKERS"))
            workers = std::atoi(env);
    }
    if (workers > 0)
        omp_set_num_threads(workers);
#else
    (void)workers;
#endif
}

int do_run(const Overrides& ov, const std::string& topology_in, const std::string& trace_csv,
           const std::string& trace_bin, const std::string& metrics_csv,
           const std::string& aggregates_csv, const std::string& schedule_csv,
           const std::string& topology_out) {
    sade::LoadedConfig cfg = ov.load();
    if (!topology_in.empty()) {
        const sade::Topology topo = sade::load_topology_file(topology_in);
        cfg.sim.topology.kind = sade::ScenarioKind::explicit_list;
        cfg.sim.topology.width = topo.width();
        cfg.sim.topology.height = topo.height();
        cfg.sim.topology.positions.assign(topo.positions().begin(), topo.positions().end());
    }
    sade::RunOptions options;
    options.record_trace = true;
    options.record_convergence = true;
    const sade::RunResult result = sade::run(cfg.sim, options);
    const sade::Trace& trace = *result.trace;

    const auto tput = sade::simulation_throughput(result.stats.s_v, result.stats.unjammed_v);
    const auto comp = sade::competitive_throughput(trace);
    std::cout << "seed " << cfg.sim.seed << ": n=" << result.stats.n << " rounds="
              << result.stats.rounds << " gamma=" << result.stats.gamma_effective << '\n';
    std::cout << "simulation_throughput " << tput.value;
    if (tput.excluded_nodes > 0)
        std::cout << " (excluded " << tput.excluded_nodes << " fully jammed nodes)";
    std::cout << '\n';
    std::cout << "competitive_throughput " << comp.value << (comp.vacuous ? " (vacuous)" : "")
              << '\n';
    std::cout << "receptions " << result.stats.receptions_total << '\n';
    std::cout << "trace_hash 0x" << std::hex << result.stats.trace_hash << std::dec << '\n';

    if (!trace_csv.empty()) {
        std::ofstream out(trace_csv);
        sade::save_trace_csv(trace, out);
    }
    if (!trace_bin.empty())
        sade::save_trace_binary_file(trace, trace_bin);
    if (!metrics_csv.empty()) {
        std::ofstream out(metrics_csv);
        sade::write_frame_metrics_csv(trace, out);
    }
    if (!aggregates_csv.empty()) {
        std::ofstream out(aggregates_csv);
        sade::write_round_aggregates_csv(trace, out);
    }
    if (!schedule_csv.empty()) {
        std::ofstream out(schedule_csv);
        sade::export_jam_schedule_csv(trace, out);
    }
    if (!topology_out.empty())
        sade::save_topology_file(trace.topo, topology_out);
    return 0;
}

int do_sweep(const Overrides& ov, const std::string& experiment) {
    sade::LoadedConfig cfg = ov.load();
    if (!experiment.empty()) {
        cfg.experiment.kind = sade::parse_experiment_kind(experiment);
    }
    const sade::ExperimentResult result = sade::run_experiment(cfg);
    std::cout << "experiment " << sade::experiment_name(result.kind) << " -> " << result.dir
              << '\n';
    for (const auto& s : result.summaries)
        std::cout << "  " << s.cell << " [" << s.protocol << "] mean_throughput "
                  << s.mean_throughput << " (stddev " << s.stddev_throughput << ", seeds "
                  << s.num_seeds << ")\n";
    if (!result.all_ok) {
        std::cerr << "some cells failed; see manifest.json\n";
        return kExitRun;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"round-based simulator for MAC protocols under SINR with adversarial jamming"};
    app.require_subcommand(1);

    int workers = 0;
    app.add_option("--workers", workers,
                   "worker threads (default: SADE_WORKERS env, then all cores)");

    Overrides run_ov, sweep_ov, compare_ov;
    std::string trace_csv, trace_bin, metrics_csv, aggregates_csv, schedule_csv, topology_out;
    std::string topology_in;
    std::string experiment;

    CLI::App* cmd_run = app.add_subcommand("run", "execute a single seeded run");
    add_common(cmd_run, run_ov);
    cmd_run->add_option("--topology", topology_in, "load node positions from a topology file");
    cmd_run->add_option("--trace-csv", trace_csv, "write the full trace as CSV");
    cmd_run->add_option("--trace-bin", trace_bin, "write the full trace in binary framing");
    cmd_run->add_option("--metrics-csv", metrics_csv, "write per-frame metrics");
    cmd_run->add_option("--aggregates-csv", aggregates_csv, "write per-round aggregates");
    cmd_run->add_option("--jam-schedule-csv", schedule_csv, "write the jam schedule audit");
    cmd_run->add_option("--save-topology", topology_out, "write the topology text format");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "run an experiment grid over seeds");
    add_common(cmd_sweep, sweep_ov);
    cmd_sweep->add_option("--experiment", experiment,
                          "single|scale_sweep|density_sweep|het_density|power_sweep|"
                          "convergence|impossibility|epsilon_sweep|baseline_compare");

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "SADE vs backoff on paired topologies and jam schedules");
    add_common(cmd_compare, compare_ov);

    CLI::App* cmd_check = app.add_subcommand("check", "run the acceptance suite");

    CLI11_PARSE(app, argc, argv);
    set_workers(workers);

    try {
        if (cmd_run->parsed())
            return do_run(run_ov, topology_in, trace_csv, trace_bin, metrics_csv,
                          aggregates_csv, schedule_csv, topology_out);
        if (cmd_sweep->parsed())
            return do_sweep(sweep_ov, experiment);
        if (cmd_compare->parsed()) {
            Overrides ov = compare_ov;
            ov.kvs.emplace_back("experiment", "baseline_compare");
            return do_sweep(ov, "");
        }
        if (cmd_check->parsed()) {
            const sade::AcceptanceReport report = sade::run_acceptance(std::cout);
            return report.all_pass() ? 0 : kExitAcceptance;
        }
    } catch (const sade::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kExitRun;
    }
    return 0;
}
