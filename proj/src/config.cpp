#include "sade/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace sade {

const char* experiment_name(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::single: return "single";
    case ExperimentKind::scale_sweep: return "scale_sweep";
    case ExperimentKind::density_sweep: return "density_sweep";
    case ExperimentKind::het_density: return "het_density";
    case ExperimentKind::power_sweep: return "power_sweep";
    case ExperimentKind::convergence: return "convergence";
    case ExperimentKind::impossibility: return "impossibility";
    case ExperimentKind::epsilon_sweep: return "epsilon_sweep";
    case ExperimentKind::baseline_compare: return "baseline_compare";
    }
    return "?";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(ExperimentKind::baseline_compare); ++k)
        if (name == experiment_name(static_cast<ExperimentKind>(k)))
            return static_cast<ExperimentKind>(k);
    throw ConfigError("experiment: unknown kind '" + name + "'");
}

std::vector<std::uint64_t> ExperimentSpec::seeds() const {
    std::vector<std::uint64_t> s(num_seeds);
    for (std::uint32_t i = 0; i < num_seeds; ++i)
        s[i] = seed_base + i;
    return s;
}

void LoadedConfig::finalize() {
    sim.adversary.epsilon = sim.phys.epsilon;
    switch (budget_rule) {
    case BudgetRule::from_theta:
        sim.adversary.budget = (1.0 - sim.phys.epsilon) * sim.phys.theta;
        break;
    case BudgetRule::from_beta:
        sim.adversary.budget = (1.0 - sim.phys.epsilon) * sim.phys.beta;
        break;
    case BudgetRule::explicit_value:
        break;
    }
}

LoadedConfig default_config() {
    LoadedConfig cfg;
    cfg.finalize();
    return cfg;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(value, &pos);
        if (pos != value.size())
            throw std::invalid_argument("trailing characters");
        return u;
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& value, Parse parse) {
    std::vector<T> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError(key + ": empty list element");
        out.push_back(parse(key, item));
    }
    if (out.empty())
        throw ConfigError(key + ": list must be non-empty");
    return out;
}

} // namespace

void apply_key(LoadedConfig& cfg, const std::string& key, const std::string& value) {
    SimConfig& sim = cfg.sim;
    if (key == "experiment") {
        cfg.experiment.kind = parse_experiment_kind(value);
    } else if (key == "out") {
        cfg.experiment.out_dir = value;
    } else if (key == "seed") {
        sim.seed = parse_u64(key, value);
        cfg.experiment.seed_base = sim.seed;
    } else if (key == "num_seeds") {
        cfg.experiment.num_seeds = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "emit_traces") {
        cfg.experiment.emit_traces = parse_bool(key, value);
    } else if (key == "scenario") {
        if (value == "uni")
            sim.topology.kind = ScenarioKind::uniform;
        else if (value == "het")
            sim.topology.kind = ScenarioKind::het;
        else
            throw ConfigError("scenario: expected uni or het, got '" + value + "'");
    } else if (key == "n") {
        sim.topology.n = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "width") {
        sim.topology.width = parse_double(key, value);
    } else if (key == "height") {
        sim.topology.height = parse_double(key, value);
    } else if (key == "het_grid_side") {
        sim.topology.grid_side = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "het_sub_size") {
        sim.topology.sub_size = parse_double(key, value);
    } else if (key == "het_lambda_min") {
        sim.topology.lambda_min = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "het_lambda_max") {
        sim.topology.lambda_max = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "alpha") {
        sim.phys.alpha = parse_double(key, value);
    } else if (key == "beta") {
        sim.phys.beta = parse_double(key, value);
    } else if (key == "theta") {
        sim.phys.theta = parse_double(key, value);
    } else if (key == "power") {
        sim.phys.power = parse_double(key, value);
    } else if (key == "epsilon") {
        sim.phys.epsilon = parse_double(key, value);
    } else if (key == "cutoff_delta") {
        sim.phys.cutoff_delta = parse_double(key, value);
    } else if (key == "jammer") {
        if (value == "reg")
            sim.adversary.kind = JammerKind::reg;
        else if (value == "bur")
            sim.adversary.kind = JammerKind::bur;
        else if (value == "const")
            sim.adversary.kind = JammerKind::constant;
        else
            throw ConfigError("jammer: expected reg, bur or const, got '" + value + "'");
    } else if (key == "budget") {
        if (value == "auto") {
            cfg.budget_rule = BudgetRule::from_theta;
        } else if (value == "auto_beta") {
            cfg.budget_rule = BudgetRule::from_beta;
        } else {
            cfg.budget_rule = BudgetRule::explicit_value;
            sim.adversary.budget = parse_double(key, value);
        }
    } else if (key == "window") {
        sim.adversary.window = parse_u64(key, value);
    } else if (key == "jammer_level") {
        sim.adversary.level = parse_double(key, value);
    } else if (key == "uniform") {
        sim.adversary.uniform = parse_bool(key, value);
    } else if (key == "strided") {
        sim.adversary.strided = parse_bool(key, value);
    } else if (key == "protocol") {
        if (value == "sade")
            sim.protocol = ProtocolKind::sade;
        else if (value == "backoff")
            sim.protocol = ProtocolKind::backoff;
        else
            throw ConfigError("protocol: expected sade or backoff, got '" + value + "'");
    } else if (key == "gamma") {
        if (value == "auto") {
            sim.gamma_auto = true;
        } else {
            sim.gamma_auto = false;
            sim.sade.gamma = parse_double(key, value);
        }
    } else if (key == "p_hat") {
        sim.sade.p_hat = parse_double(key, value);
    } else if (key == "cw_min") {
        sim.backoff.cw_min = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "cw_max") {
        sim.backoff.cw_max = static_cast<std::uint32_t>(parse_u64(key, value));
    } else if (key == "rounds") {
        sim.rounds = parse_u64(key, value);
    } else if (key == "frame_len") {
        sim.frame_len = parse_u64(key, value);
    } else if (key == "grid_cell") {
        sim.grid_cell = value == "auto" ? 0.0 : parse_double(key, value);
    } else if (key == "parallel") {
        sim.parallel = parse_bool(key, value);
    } else if (key == "sweep_n") {
        auto xs = parse_list<std::uint64_t>(key, value, parse_u64);
        cfg.experiment.sweep_n.assign(xs.begin(), xs.end());
    } else if (key == "sweep_alpha") {
        cfg.experiment.sweep_alpha = parse_list<double>(key, value, parse_double);
    } else if (key == "sweep_power") {
        cfg.experiment.sweep_power = parse_list<double>(key, value, parse_double);
    } else if (key == "sweep_epsilon") {
        cfg.experiment.sweep_epsilon = parse_list<double>(key, value, parse_double);
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

LoadedConfig parse_config(std::istream& in) {
    LoadedConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        try {
            apply_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    cfg.finalize();
    cfg.sim.validate();
    cfg.experiment.validate();
    return cfg;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

void write_effective_config(const LoadedConfig& cfg, std::ostream& out) {
    const SimConfig& sim = cfg.sim;
    out.precision(17);
    out << "experiment = " << experiment_name(cfg.experiment.kind) << '\n';
    out << "out = " << cfg.experiment.out_dir << '\n';
    out << "seed = " << sim.seed << '\n';
    out << "num_seeds = " << cfg.experiment.num_seeds << '\n';
    out << "emit_traces = " << (cfg.experiment.emit_traces ? "true" : "false") << '\n';
    out << "scenario = " << (sim.topology.kind == ScenarioKind::het ? "het" : "uni") << '\n';
    out << "n = " << sim.topology.n << '\n';
    out << "width = " << sim.topology.width << '\n';
    out << "height = " << sim.topology.height << '\n';
    out << "het_grid_side = " << sim.topology.grid_side << '\n';
    out << "het_sub_size = " << sim.topology.sub_size << '\n';
    out << "het_lambda_min = " << sim.topology.lambda_min << '\n';
    out << "het_lambda_max = " << sim.topology.lambda_max << '\n';
    out << "alpha = " << sim.phys.alpha << '\n';
    out << "beta = " << sim.phys.beta << '\n';
    out << "theta = " << sim.phys.theta << '\n';
    out << "power = " << sim.phys.power << '\n';
    out << "epsilon = " << sim.phys.epsilon << '\n';
    out << "cutoff_delta = " << sim.phys.cutoff_delta << '\n';
    switch (sim.adversary.kind) {
    case JammerKind::reg: out << "jammer = reg\n"; break;
    case JammerKind::bur: out << "jammer = bur\n"; break;
    case JammerKind::constant: out << "jammer = const\n"; break;
    }
    out << "budget = " << sim.adversary.budget << '\n';
    out << "window = " << sim.adversary.window << '\n';
    out << "jammer_level = " << sim.adversary.level << '\n';
    out << "uniform = " << (sim.adversary.uniform ? "true" : "false") << '\n';
    out << "strided = " << (sim.adversary.strided ? "true" : "false") << '\n';
    out << "protocol = " << (sim.protocol == ProtocolKind::sade ? "sade" : "backoff") << '\n';
    if (sim.gamma_auto)
        out << "gamma = auto\n";
    else
        out << "gamma = " << sim.sade.gamma << '\n';
    out << "p_hat = " << sim.sade.p_hat << '\n';
    out << "cw_min = " << sim.backoff.cw_min << '\n';
    out << "cw_max = " << sim.backoff.cw_max << '\n';
    out << "rounds = " << sim.rounds << '\n';
    out << "frame_len = " << sim.frame_len << '\n';
    if (sim.grid_cell == 0.0)
        out << "grid_cell = auto\n";
    else
        out << "grid_cell = " << sim.grid_cell << '\n';
    out << "parallel = " << (sim.parallel ? "true" : "false") << '\n';

    auto write_list = [&out](const char* key, const auto& xs) {
        out << key << " = ";
        for (std::size_t i = 0; i < xs.size(); ++i)
            out << (i ? "," : "") << xs[i];
        out << '\n';
    };
    write_list("sweep_n", cfg.experiment.sweep_n);
    write_list("sweep_alpha", cfg.experiment.sweep_alpha);
    write_list("sweep_power", cfg.experiment.sweep_power);
    write_list("sweep_epsilon", cfg.experiment.sweep_epsilon);
}

} // namespace sade
