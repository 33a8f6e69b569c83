#include "sade/engine.hpp"

#include "sade/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace sade {

void TopologySpec::validate() const {
    switch (kind) {
    case ScenarioKind::uniform:
        if (n < 1)
            throw ConfigError("topology.n: must be >= 1");
        if (!(width > 0.0) || !(height > 0.0))
            throw ConfigError("topology: width and height must be > 0");
        break;
    case ScenarioKind::het:
        if (grid_side < 1)
            throw ConfigError("topology.grid_side: must be >= 1");
        if (!(sub_size > 0.0))
            throw ConfigError("topology.sub_size: must be > 0");
        if (lambda_min > lambda_max)
            throw ConfigError("topology: lambda_min must be <= lambda_max");
        break;
    case ScenarioKind::explicit_list:
        if (positions.empty())
            throw ConfigError("topology: explicit position list is empty");
        if (!(width > 0.0) || !(height > 0.0))
            throw ConfigError("topology: width and height must be > 0");
        break;
    }
}

BuiltTopology build_topology(const TopologySpec& spec, std::uint64_t seed) {
    spec.validate();
    SubstreamRng rng(seed, 0, StreamPurpose::placement);
    switch (spec.kind) {
    case ScenarioKind::uniform:
        return {gen_uniform(spec.n, spec.width, spec.height, rng), {}};
    case ScenarioKind::het: {
        HetScenario het = gen_het(spec.grid_side, spec.sub_size, spec.lambda_min,
                                  spec.lambda_max, rng);
        return {std::move(het.topo), std::move(het.cell_of_node)};
    }
    case ScenarioKind::explicit_list:
        return {Topology(spec.width, spec.height, spec.positions), {}};
    }
    throw ConfigError("unknown scenario kind");
}

void SimConfig::validate() const {
    topology.validate();
    phys.validate();
    adversary.validate();
    if (!gamma_auto)
        sade.validate();
    else if (!(sade.p_hat > 0.0 && sade.p_hat < 1.0))
        throw ConfigError("sade.p_hat: must be in (0,1)");
    backoff.validate();
    if (rounds < 1)
        throw ConfigError("rounds: must be >= 1");
    if (!(grid_cell >= 0.0))
        throw ConfigError("grid_cell: must be >= 0 (0 selects R1)");
}

double effective_gamma(const SimConfig& config, std::uint32_t n) {
    return config.gamma_auto ? default_gamma(config.adversary.window, n) : config.sade.gamma;
}

namespace {

// Sum with a long double accumulator: exact for the few thousand terms we
// ever add, so the reported aggregate equals n*p_hat bit-for-bit at round 0.
double aggregate_p(std::span<const SadeState> states) noexcept {
    long double acc = 0.0L;
    for (const SadeState& s : states)
        acc += s.p;
    return static_cast<double>(acc);
}

} // namespace

RunResult run(const SimConfig& config_in, const RunOptions& options) {
    SimConfig config = config_in;
    config.validate();

    BuiltTopology built = build_topology(config.topology, config.seed);
    const Topology& topo = built.topo;
    const std::uint32_t n = topo.size();

    config.sade.gamma = effective_gamma(config, n);
    config.gamma_auto = false;
    config.sade.validate();

    const bool is_sade = config.protocol == ProtocolKind::sade;
    const double cell =
        config.grid_cell > 0.0 ? config.grid_cell : zone_radii(config.phys).r1;
    const GridIndex grid(topo, cell);
    Adversary adversary(config.adversary, config.seed, n);

    std::vector<SubstreamRng> decision_rng;
    std::vector<SubstreamRng> backoff_rng;
    decision_rng.reserve(n);
    for (std::uint32_t v = 0; v < n; ++v)
        decision_rng.emplace_back(config.seed, v, StreamPurpose::decision);
    if (!is_sade) {
        backoff_rng.reserve(n);
        for (std::uint32_t v = 0; v < n; ++v)
            backoff_rng.emplace_back(config.seed, v, StreamPurpose::backoff);
    }

    std::vector<SadeState> sade_cur, sade_next;
    std::vector<BackoffState> backoff_cur;
    if (is_sade) {
        sade_cur.assign(n, sade_init(config.sade));
        sade_next.resize(n);
    } else {
        backoff_cur.reserve(n);
        for (std::uint32_t v = 0; v < n; ++v)
            backoff_cur.push_back(backoff_init(config.backoff, backoff_rng[v]));
    }

    RunResult result;
    RunStats& stats = result.stats;
    stats.n = n;
    stats.rounds = config.rounds;
    stats.seed = config.seed;
    stats.gamma_effective = config.sade.gamma;
    stats.s_v.assign(n, 0);
    stats.unjammed_v.assign(n, 0);
    if (options.record_convergence)
        stats.aggregate_p.reserve(config.rounds);

    if (options.record_trace) {
        const std::size_t total = static_cast<std::size_t>(config.rounds) * n;
        result.trace.emplace(Trace{config, topo, built.het_cell, n, config.rounds,
                                   std::vector<Action>(total), std::vector<Observation>(total),
                                   std::vector<double>(total), std::vector<std::uint8_t>(total),
                                   {}, {}});
    }

    WordHash trace_hasher, noise_hasher;
    hash_header(trace_hasher, n, config.rounds, config.seed);

    const double jam_level = config.phys.jam_threshold();

    std::vector<double> noise(n);
    std::vector<std::uint8_t> pot_busy(n);
    std::vector<Action> actions(n), prev_actions;
    std::vector<NodeId> transmitters;
    std::vector<std::uint8_t> is_tx(n);
    std::vector<Observation> obs(n);
    std::vector<std::uint8_t> delivered(n);
    ObserveScratch scratch;
    transmitters.reserve(n);

    for (std::uint64_t t = 0; t < config.rounds; ++t) {
        // Phase 1: adversary, from the beginning-of-round snapshot.
        AdversaryView view{t, sade_cur, backoff_cur, prev_actions};
        adversary.noise_for_round(view, noise);
        for (std::uint32_t v = 0; v < n; ++v)
            pot_busy[v] = noise[v] >= jam_level ? 1 : 0;

        if (options.record_convergence && is_sade)
            stats.aggregate_p.push_back(aggregate_p(sade_cur));
        if (t == 0 && is_sade)
            stats.initial_aggregate = aggregate_p(sade_cur);

        // Phase 2: decisions.
        transmitters.clear();
        if (is_sade) {
            for (std::uint32_t v = 0; v < n; ++v)
                actions[v] = sade_decide(sade_cur[v], decision_rng[v]);
        } else {
            for (std::uint32_t v = 0; v < n; ++v)
                actions[v] = backoff_decide(backoff_cur[v]);
        }
        for (std::uint32_t v = 0; v < n; ++v) {
            is_tx[v] = actions[v] == Action::transmit ? 1 : 0;
            if (is_tx[v])
                transmitters.push_back(v);
        }

        // Phase 3: observations (reception checked before idle/busy).
        RoundActivity activity{transmitters, is_tx, noise};
        bool unique_ok = true;
        if (config.parallel)
            observe_all_parallel(activity, topo, grid, config.phys, scratch, obs, unique_ok);
        else
            observe_all_serial(activity, topo, grid, config.phys, scratch, obs, unique_ok);
        if (!unique_ok)
            stats.uniqueness_ok = false;

        std::fill(delivered.begin(), delivered.end(), 0);
        std::uint32_t round_receptions = 0, round_idles = 0;
        for (std::uint32_t v = 0; v < n; ++v) {
            if (obs[v].kind == ObsKind::received) {
                delivered[obs[v].sender] = 1;
                stats.s_v[v] += 1;
                stats.receptions_total += 1;
                ++round_receptions;
            } else if (obs[v].kind == ObsKind::idle) {
                ++round_idles;
            }
            if (!pot_busy[v])
                stats.unjammed_v[v] += 1;
        }
        if (options.record_convergence) {
            stats.receptions_per_round.push_back(round_receptions);
            stats.idles_per_round.push_back(round_idles);
        }

        // Phase 4: state updates.
        if (is_sade) {
            for (std::uint32_t v = 0; v < n; ++v)
                sade_next[v] = sade_update(sade_cur[v], obs[v], config.sade);
        } else {
            for (std::uint32_t v = 0; v < n; ++v)
                backoff_cur[v] = backoff_update(backoff_cur[v], obs[v], delivered[v] != 0,
                                                config.backoff, backoff_rng[v]);
        }

        // Phase 5: record.
        hash_round(trace_hasher, t, actions, obs, noise);
        for (std::uint32_t v = 0; v < n; ++v)
            noise_hasher.add_double(noise[v]);
        if (result.trace) {
            Trace& tr = *result.trace;
            const std::size_t base = tr.at(t, 0);
            std::copy(actions.begin(), actions.end(), tr.actions.begin() + base);
            std::copy(obs.begin(), obs.end(), tr.obs.begin() + base);
            std::copy(noise.begin(), noise.end(), tr.noise.begin() + base);
            std::copy(pot_busy.begin(), pot_busy.end(), tr.pot_busy.begin() + base);
        }
        if (!options.sinks.empty()) {
            RoundView rv;
            rv.round = t;
            rv.n = n;
            rv.actions = actions;
            rv.obs = obs;
            rv.noise = noise;
            rv.pot_busy = pot_busy;
            rv.delivered = delivered;
            rv.sade_before = sade_cur;
            rv.sade_after = sade_next;
            for (RoundSink* sink : options.sinks)
                sink->on_round(rv);
        }

        if (is_sade)
            sade_cur.swap(sade_next);
        prev_actions = actions;
    }

    stats.ledger_exact = !adversary.exact_budget() || adversary.ledger().all_complete_windows_exact();
    stats.trace_hash = trace_hasher.value();
    stats.noise_hash = noise_hasher.value();
    if (result.trace) {
        if (is_sade)
            result.trace->final_sade = sade_cur;
        else
            result.trace->final_backoff = backoff_cur;
    }
    for (RoundSink* sink : options.sinks)
        sink->on_finish();
    return result;
}

std::vector<RunResult> run_batch(const SimConfig& config, std::span<const std::uint64_t> seeds,
                                 const RunOptions& options) {
    if (seeds.empty())
        throw ConfigError("run_batch: seed list is empty");
    if (!options.sinks.empty() && seeds.size() > 1)
        throw ConfigError("run_batch: per-run sinks are not shareable across parallel runs; "
                          "drive run() directly instead");
    std::vector<RunResult> results(seeds.size());
    std::vector<std::exception_ptr> errors(seeds.size());

#pragma omp parallel for schedule(dynamic) if (seeds.size() > 1)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(seeds.size()); ++i) {
        try {
            SimConfig c = config;
            c.seed = seeds[i];
            results[i] = run(c, options);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& err : errors)
        if (err)
            std::rethrow_exception(err);
    return results;
}

} // namespace sade
