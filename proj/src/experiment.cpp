#include "sade/experiment.hpp"

#include "sade/metrics.hpp"
#include "sade/trace_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace sade {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Task {
    std::string cell;
    double param = 0.0;
    SimConfig config;
    std::uint64_t seed = 0;
    bool record_convergence = false;
    bool emit_trace = false;
    std::string series_path; // relative to the experiment dir
    std::string trace_path;
};

struct TaskOutcome {
    RunRow row;
    std::string series_csv;   // written by the collector
    std::string subsq_rows;   // het_density: per-sub-square lines
};

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

TaskOutcome execute(const Task& task, const std::string& dir) {
    TaskOutcome out;
    RunRow& row = out.row;
    row.cell = task.cell;
    row.param = task.param;
    row.protocol = task.config.protocol == ProtocolKind::sade ? "sade" : "backoff";
    row.seed = task.seed;
    try {
        SimConfig config = task.config;
        config.seed = task.seed;
        RunOptions options;
        options.record_trace = task.emit_trace;
        options.record_convergence = task.record_convergence;
        RunResult result = run(config, options);
        const RunStats& stats = result.stats;

        const SimThroughput tput = simulation_throughput(stats.s_v, stats.unjammed_v);
        row.throughput = tput.value;
        row.excluded_nodes = tput.excluded_nodes;
        std::uint64_t f_total = 0, s_total = 0;
        for (std::uint32_t v = 0; v < stats.n; ++v) {
            f_total += stats.unjammed_v[v];
            s_total += stats.s_v[v];
        }
        row.vacuous = f_total == 0;
        row.competitive = row.vacuous ? 1.0 : static_cast<double>(s_total) / static_cast<double>(f_total);
        row.receptions = stats.receptions_total;
        row.trace_hash = stats.trace_hash;
        row.noise_hash = stats.noise_hash;

        if (task.record_convergence) {
            std::ostringstream os;
            os.precision(17);
            os << "round,aggregate_p,receptions,idle_count\n";
            for (std::size_t t = 0; t < stats.aggregate_p.size(); ++t)
                os << t << ',' << stats.aggregate_p[t] << ',' << stats.receptions_per_round[t]
                   << ',' << stats.idles_per_round[t] << '\n';
            out.series_csv = os.str();
        }
        if (task.emit_trace && result.trace) {
            std::ofstream tf(dir + "/" + task.trace_path);
            save_trace_csv(*result.trace, tf);
        }
        if (config.topology.kind == ScenarioKind::het) {
            const BuiltTopology built = build_topology(config.topology, config.seed);
            const std::uint32_t cells =
                config.topology.grid_side * config.topology.grid_side;
            std::vector<std::uint64_t> s(cells, 0), f(cells, 0), count(cells, 0);
            std::vector<long double> acc(cells, 0.0L);
            std::vector<std::uint32_t> counted(cells, 0);
            for (std::uint32_t v = 0; v < stats.n; ++v) {
                const std::uint32_t c = built.het_cell[v];
                count[c] += 1;
                if (stats.unjammed_v[v] > 0) {
                    acc[c] += static_cast<long double>(stats.s_v[v]) /
                              static_cast<long double>(stats.unjammed_v[v]);
                    counted[c] += 1;
                }
            }
            const double area = config.topology.sub_size * config.topology.sub_size;
            std::ostringstream os;
            os.precision(10);
            for (std::uint32_t c = 0; c < cells; ++c) {
                const double mean =
                    counted[c] ? static_cast<double>(acc[c] / counted[c]) : 0.0;
                os << task.seed << ',' << c << ',' << count[c] << ','
                   << static_cast<double>(count[c]) / area << ',' << mean << '\n';
            }
            out.subsq_rows = os.str();
        }
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return out;
}

} // namespace

CellSummary summarize_cell(const std::string& cell, double param, const std::string& protocol,
                           std::span<const RunRow> rows) {
    CellSummary s;
    s.cell = cell;
    s.param = param;
    s.protocol = protocol;
    double sum = 0.0, sum2 = 0.0, comp = 0.0;
    s.min_throughput = 1.0;
    s.max_throughput = 0.0;
    for (const RunRow& r : rows) {
        sum += r.throughput;
        sum2 += r.throughput * r.throughput;
        comp += r.competitive;
        s.min_throughput = std::min(s.min_throughput, r.throughput);
        s.max_throughput = std::max(s.max_throughput, r.throughput);
        ++s.num_seeds;
    }
    if (s.num_seeds > 0) {
        s.mean_throughput = sum / s.num_seeds;
        s.mean_competitive = comp / s.num_seeds;
    }
    if (s.num_seeds > 1) {
        const double var =
            (sum2 - sum * sum / s.num_seeds) / static_cast<double>(s.num_seeds - 1);
        s.stddev_throughput = var > 0.0 ? std::sqrt(var) : 0.0;
    }
    return s;
}

ExperimentResult run_experiment(const LoadedConfig& cfg) {
    cfg.sim.validate();
    cfg.experiment.validate();
    const ExperimentSpec& spec = cfg.experiment;
    const auto seeds = spec.seeds();

    std::vector<Task> tasks;
    auto add_cell = [&](const std::string& cell, double param, const SimConfig& config,
                        bool series) {
        for (std::uint64_t seed : seeds) {
            Task t;
            t.cell = cell;
            t.param = param;
            t.config = config;
            t.seed = seed;
            t.record_convergence = series;
            t.emit_trace = spec.emit_traces;
            if (series)
                t.series_path = cell + "/" + std::to_string(seed) + ".csv";
            if (spec.emit_traces)
                t.trace_path = cell + "/" + std::to_string(seed) + "_trace.csv";
            tasks.push_back(std::move(t));
        }
    };

    switch (spec.kind) {
    case ExperimentKind::single:
        add_cell("single", static_cast<double>(cfg.sim.topology.n), cfg.sim, false);
        break;
    case ExperimentKind::scale_sweep:
        for (double alpha : spec.sweep_alpha) {
            for (std::uint32_t n : spec.sweep_n) {
                SimConfig c = cfg.sim;
                c.phys.alpha = alpha;
                c.topology.kind = ScenarioKind::uniform;
                c.topology.n = n;
                c.topology.width = std::sqrt(static_cast<double>(n));
                c.topology.height = c.topology.width;
                add_cell("alpha=" + format_param(alpha) + ",n=" + std::to_string(n),
                         static_cast<double>(n), c, false);
            }
        }
        break;
    case ExperimentKind::density_sweep:
        for (std::uint32_t n : spec.sweep_n) {
            SimConfig c = cfg.sim;
            c.topology.kind = ScenarioKind::uniform;
            c.topology.n = n;
            const double density =
                static_cast<double>(n) / (c.topology.width * c.topology.height);
            add_cell("n=" + std::to_string(n), density, c, false);
        }
        break;
    case ExperimentKind::het_density: {
        SimConfig c = cfg.sim;
        c.topology.kind = ScenarioKind::het;
        add_cell("het", 0.0, c, false);
        break;
    }
    case ExperimentKind::power_sweep:
        for (double power : spec.sweep_power) {
            SimConfig c = cfg.sim;
            c.phys.power = power;
            add_cell("power=" + format_param(power), power, c, true);
        }
        break;
    case ExperimentKind::convergence:
        add_cell("convergence", static_cast<double>(cfg.sim.topology.n), cfg.sim, true);
        break;
    case ExperimentKind::impossibility:
        add_cell("impossibility", 0.0, impossibility_config(cfg.sim), false);
        break;
    case ExperimentKind::epsilon_sweep:
        for (double eps : spec.sweep_epsilon) {
            LoadedConfig c = cfg;
            c.sim.phys.epsilon = eps;
            c.finalize();
            add_cell("epsilon=" + format_param(eps), eps, c.sim, false);
        }
        break;
    case ExperimentKind::baseline_compare:
        for (double eps : spec.sweep_epsilon) {
            LoadedConfig c = cfg;
            c.sim.phys.epsilon = eps;
            c.finalize();
            for (ProtocolKind proto : {ProtocolKind::sade, ProtocolKind::backoff}) {
                SimConfig sc = c.sim;
                sc.protocol = proto;
                add_cell("epsilon=" + format_param(eps), eps, sc, false);
            }
        }
        break;
    }

    ExperimentResult result;
    result.kind = spec.kind;
    const fs::path dir = fs::path(spec.out_dir) / experiment_name(spec.kind);
    result.dir = dir.string();
    fs::create_directories(dir);
    for (const Task& t : tasks) {
        if (!t.series_path.empty())
            fs::create_directories((dir / t.series_path).parent_path());
        if (!t.trace_path.empty())
            fs::create_directories((dir / t.trace_path).parent_path());
    }

    std::vector<TaskOutcome> outcomes(tasks.size());
    const std::string dir_str = dir.string();
#pragma omp parallel for schedule(dynamic) if (tasks.size() > 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i)
        outcomes[i] = execute(tasks[i], dir_str);

    // Single-threaded collection: one writer for every shared artifact.
    result.all_ok = true;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        result.rows.push_back(outcomes[i].row);
        if (!outcomes[i].row.ok)
            result.all_ok = false;
        if (!tasks[i].series_path.empty() && !outcomes[i].series_csv.empty()) {
            std::ofstream out(dir / tasks[i].series_path);
            out << outcomes[i].series_csv;
        }
    }

    if (spec.kind == ExperimentKind::het_density) {
        std::ofstream out(dir / "subsquares.csv");
        out << "seed,subsquare,nodes,density,throughput\n";
        for (const TaskOutcome& o : outcomes)
            out << o.subsq_rows;
    }

    {
        std::ofstream out(dir / "runs.csv");
        out.precision(17);
        out << "experiment,cell,param,protocol,seed,throughput,excluded_nodes,competitive,"
               "vacuous,receptions,trace_hash,noise_hash,status,error\n";
        for (const RunRow& r : result.rows) {
            out << experiment_name(spec.kind) << ',' << r.cell << ',' << r.param << ','
                << r.protocol << ',' << r.seed << ',' << r.throughput << ','
                << r.excluded_nodes << ',' << r.competitive << ',' << (r.vacuous ? 1 : 0) << ','
                << r.receptions << ',' << hex64(r.trace_hash) << ',' << hex64(r.noise_hash)
                << ',' << (r.ok ? "ok" : "failed") << ',' << r.error << '\n';
        }
    }

    // Summaries per (cell, protocol), preserving first-seen order.
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<RunRow>> groups;
    for (const RunRow& r : result.rows) {
        if (!r.ok)
            continue;
        auto key = std::make_pair(r.cell, r.protocol);
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(r);
    }
    for (const auto& key : order) {
        const auto& rows = groups[key];
        result.summaries.push_back(
            summarize_cell(key.first, rows.front().param, key.second, rows));
    }
    {
        std::ofstream out(dir / "summary.csv");
        out.precision(17);
        out << "experiment,cell,param,protocol,num_seeds,mean_throughput,stddev_throughput,"
               "mean_competitive,min_throughput,max_throughput\n";
        for (const CellSummary& s : result.summaries)
            out << experiment_name(spec.kind) << ',' << s.cell << ',' << s.param << ','
                << s.protocol << ',' << s.num_seeds << ',' << s.mean_throughput << ','
                << s.stddev_throughput << ',' << s.mean_competitive << ','
                << s.min_throughput << ',' << s.max_throughput << '\n';
    }

    if (spec.kind == ExperimentKind::baseline_compare) {
        // Paired runs must have consumed identical jam schedules.
        std::map<std::pair<std::string, std::uint64_t>, std::vector<std::uint64_t>> pairing;
        for (const RunRow& r : result.rows)
            if (r.ok)
                pairing[{r.cell, r.seed}].push_back(r.noise_hash);
        for (const auto& [key, hashes] : pairing)
            for (std::uint64_t h : hashes)
                if (h != hashes.front())
                    result.pairing_ok = false;
    }

    json manifest;
    manifest["experiment"] = experiment_name(spec.kind);
    {
        std::ostringstream cfg_text;
        write_effective_config(cfg, cfg_text);
        manifest["config"] = cfg_text.str();
    }
    manifest["seeds"] = seeds;
    manifest["all_ok"] = result.all_ok;
    if (spec.kind == ExperimentKind::baseline_compare)
        manifest["pairing_ok"] = result.pairing_ok;
    json cells = json::array();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const RunRow& r = result.rows[i];
        json entry;
        entry["cell"] = r.cell;
        entry["param"] = r.param;
        entry["protocol"] = r.protocol;
        entry["seed"] = r.seed;
        entry["status"] = r.ok ? "ok" : "failed";
        if (!r.ok)
            entry["error"] = r.error;
        entry["throughput"] = r.throughput;
        entry["competitive"] = r.competitive;
        entry["receptions"] = r.receptions;
        entry["trace_hash"] = hex64(r.trace_hash);
        entry["noise_hash"] = hex64(r.noise_hash);
        json files = json::array();
        for (const std::string& rel : {tasks[i].series_path, tasks[i].trace_path}) {
            if (rel.empty())
                continue;
            const fs::path p = dir / rel;
            if (fs::exists(p)) {
                json f;
                f["path"] = rel;
                f["fnv64"] = hex64(hash_file(p.string()));
                files.push_back(f);
            }
        }
        entry["files"] = files;
        cells.push_back(entry);
    }
    manifest["runs"] = cells;
    {
        std::ofstream out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }

    return result;
}

ExperimentResult compare_protocols(const LoadedConfig& cfg) {
    LoadedConfig c = cfg;
    c.experiment.kind = ExperimentKind::baseline_compare;
    return run_experiment(c);
}

SimConfig impossibility_config(const SimConfig& base) {
    SimConfig c = base;
    const double r1 = zone_radii(c.phys).r1;
    c.topology.kind = ScenarioKind::explicit_list;
    c.topology.width = 4.0 * r1;
    c.topology.height = 4.0 * r1;
    c.topology.positions = {{r1, r1}, {2.0 * r1, r1}};
    c.adversary.kind = JammerKind::constant;
    c.adversary.level = 1.1 * c.phys.theta;
    return c;
}

} // namespace sade
