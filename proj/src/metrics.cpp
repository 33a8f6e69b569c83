#include "sade/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace sade {

std::vector<FrameMetrics> frame_metrics(const Trace& trace, std::uint64_t frame_len) {
    if (frame_len == 0)
        frame_len = trace.config.frame_len;
    if (frame_len == 0)
        frame_len = trace.rounds;
    std::vector<FrameMetrics> frames;
    for (std::uint64_t begin = 0; begin < trace.rounds; begin += frame_len) {
        const std::uint64_t end = std::min(trace.rounds, begin + frame_len);
        FrameMetrics fm;
        fm.begin = begin;
        fm.end = end;
        fm.f_v.assign(trace.n, 0);
        fm.s_v.assign(trace.n, 0);
        fm.unjammed.assign(trace.n, 0);
        for (std::uint64_t t = begin; t < end; ++t) {
            for (NodeId v = 0; v < trace.n; ++v) {
                const std::size_t i = trace.at(t, v);
                if (!trace.pot_busy[i]) {
                    fm.f_v[v] += 1;
                    fm.unjammed[v] += 1;
                }
                if (trace.obs[i].kind == ObsKind::received)
                    fm.s_v[v] += 1;
            }
        }
        frames.push_back(std::move(fm));
    }
    return frames;
}

CompetitiveResult competitive_throughput(const Trace& trace, std::uint64_t begin,
                                         std::uint64_t end) {
    if (begin > end || end > trace.rounds)
        throw ConfigError("competitive_throughput: frame out of range");
    std::uint64_t s_total = 0, f_total = 0;
    for (std::uint64_t t = begin; t < end; ++t) {
        for (NodeId v = 0; v < trace.n; ++v) {
            const std::size_t i = trace.at(t, v);
            if (!trace.pot_busy[i])
                f_total += 1;
            if (trace.obs[i].kind == ObsKind::received)
                s_total += 1;
        }
    }
    if (f_total == 0)
        return {1.0, true};
    return {static_cast<double>(s_total) / static_cast<double>(f_total), false};
}

CompetitiveResult competitive_throughput(const Trace& trace) {
    return competitive_throughput(trace, 0, trace.rounds);
}

SimThroughput simulation_throughput(std::span<const std::uint64_t> s_v,
                                    std::span<const std::uint64_t> unjammed_v) {
    SimThroughput result;
    long double acc = 0.0L;
    std::size_t counted = 0;
    for (std::size_t v = 0; v < s_v.size(); ++v) {
        if (unjammed_v[v] == 0) {
            result.excluded_nodes += 1;
            continue;
        }
        acc += static_cast<long double>(s_v[v]) / static_cast<long double>(unjammed_v[v]);
        ++counted;
    }
    if (counted > 0)
        result.value = static_cast<double>(acc / static_cast<long double>(counted));
    return result;
}

SimThroughput simulation_throughput(const Trace& trace) {
    const auto frames = frame_metrics(trace, trace.rounds);
    return simulation_throughput(frames.front().s_v, frames.front().unjammed);
}

double aggregate_probability(std::span<const SadeState> states) {
    long double acc = 0.0L;
    for (const SadeState& s : states)
        acc += s.p;
    return static_cast<double>(acc);
}

double aggregate_probability(std::span<const SadeState> states, std::span<const NodeId> subset) {
    if (subset.empty())
        throw ConfigError("aggregate_probability: subset is empty");
    long double acc = 0.0L;
    for (NodeId v : subset)
        acc += states[v].p;
    return static_cast<double>(acc);
}

std::vector<SadeState> replay_states_at(const Trace& trace, std::uint64_t round) {
    if (trace.config.protocol != ProtocolKind::sade)
        throw ConfigError("replay: trace was not produced by the sade protocol");
    if (round > trace.rounds)
        throw ConfigError("replay: round out of range");
    std::vector<SadeState> states(trace.n, sade_init(trace.config.sade));
    for (std::uint64_t t = 0; t < round; ++t)
        for (NodeId v = 0; v < trace.n; ++v)
            states[v] = sade_update(states[v], trace.obs[trace.at(t, v)], trace.config.sade);
    return states;
}

SectorClass classify_sector(double p_s) noexcept {
    if (p_s <= rho_green) return SectorClass::green;
    if (p_s <= rho_yellow) return SectorClass::yellow;
    if (p_s <= rho_red) return SectorClass::red;
    return SectorClass::exceeded;
}

namespace {

// Sector of u as seen from v: six 60-degree wedges starting at the positive
// x axis, boundary angles assigned to the lower wedge.
int sector_of(const Position& pv, const Position& pu, double w, double h) noexcept {
    double dx = pu.x - pv.x;
    double dy = pu.y - pv.y;
    if (dx > 0.5 * w) dx -= w;
    if (dx < -0.5 * w) dx += w;
    if (dy > 0.5 * h) dy -= h;
    if (dy < -0.5 * h) dy += h;
    double a = std::atan2(dy, dx);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    constexpr double wedge = two_pi / 6.0;
    if (a < 0) a += two_pi;
    int s = static_cast<int>(a / wedge);
    if (s > 0 && static_cast<double>(s) * wedge == a) s -= 1;
    return std::min(s, 5);
}

} // namespace

SectorDiagnostics sector_diagnostics(const Topology& topo, const GridIndex& index,
                                     const PhysicalConfig& phys, std::span<const SadeState> states,
                                     NodeId v) {
    const double r1 = zone_radii(phys).r1;
    SectorDiagnostics diag;
    std::array<long double, 6> acc{};
    for (NodeId u : nodes_within(topo, index, v, r1)) {
        const int s = sector_of(topo.pos(v), topo.pos(u), topo.width(), topo.height());
        acc[s] += states[u].p;
        diag.node_count[s] += 1;
    }
    for (int s = 0; s < 6; ++s) {
        diag.p_s[s] = static_cast<double>(acc[s]);
        diag.cls[s] = classify_sector(diag.p_s[s]);
    }
    return diag;
}

SectorDiagnostics sector_diagnostics(const Trace& trace, const GridIndex& index, NodeId v,
                                     std::uint64_t round) {
    const std::vector<SadeState> states = replay_states_at(trace, round);
    return sector_diagnostics(trace.topo, index, trace.config.phys, states, v);
}

OpenRoundStats open_rounds(const Trace& trace, const GridIndex& index) {
    const double r1 = zone_radii(trace.config.phys).r1;
    std::vector<std::vector<NodeId>> disk(trace.n);
    for (NodeId v = 0; v < trace.n; ++v)
        disk[v] = nodes_within(trace.topo, index, v, r1);

    OpenRoundStats stats;
    stats.open_v.assign(trace.n, 0);
    for (std::uint64_t t = 0; t < trace.rounds; ++t) {
        const std::size_t base = trace.at(t, 0);
        for (NodeId v = 0; v < trace.n; ++v) {
            if (trace.pot_busy[base + v])
                continue;
            for (NodeId u : disk[v]) {
                if (!trace.pot_busy[base + u]) {
                    stats.open_v[v] += 1;
                    break;
                }
            }
        }
    }
    return stats;
}

bool sliding_budget_ok(const Trace& trace, double tolerance) {
    const double bound =
        trace.config.adversary.effective_budget() * static_cast<double>(trace.config.adversary.window);
    const std::uint64_t window = trace.config.adversary.window;
    if (trace.rounds < window)
        return true;
    for (NodeId v = 0; v < trace.n; ++v) {
        double sum = 0.0;
        for (std::uint64_t t = 0; t < window; ++t)
            sum += trace.noise[trace.at(t, v)];
        if (sum > bound + tolerance)
            return false;
        for (std::uint64_t t = window; t < trace.rounds; ++t) {
            sum += trace.noise[trace.at(t, v)] - trace.noise[trace.at(t - window, v)];
            if (sum > bound + tolerance)
                return false;
        }
    }
    return true;
}

void write_frame_metrics_csv(const Trace& trace, std::ostream& out, std::uint64_t frame_len) {
    out << "frame,node,f_v,s_v,unjammed\n";
    const auto frames = frame_metrics(trace, frame_len);
    for (std::size_t f = 0; f < frames.size(); ++f)
        for (NodeId v = 0; v < trace.n; ++v)
            out << f << ',' << v << ',' << frames[f].f_v[v] << ',' << frames[f].s_v[v] << ','
                << frames[f].unjammed[v] << '\n';
}

void write_round_aggregates_csv(const Trace& trace, std::ostream& out) {
    out.precision(17);
    out << "round,aggregate_p,receptions,idle_count\n";
    std::vector<SadeState> states(trace.n, sade_init(trace.config.sade));
    for (std::uint64_t t = 0; t < trace.rounds; ++t) {
        std::uint64_t receptions = 0, idles = 0;
        for (NodeId v = 0; v < trace.n; ++v) {
            const auto kind = trace.obs[trace.at(t, v)].kind;
            if (kind == ObsKind::received) ++receptions;
            if (kind == ObsKind::idle) ++idles;
        }
        out << t << ',' << aggregate_probability(states) << ',' << receptions << ',' << idles
            << '\n';
        for (NodeId v = 0; v < trace.n; ++v)
            states[v] = sade_update(states[v], trace.obs[trace.at(t, v)], trace.config.sade);
    }
}

} // namespace sade
