#pragma once

#include "sade/engine.hpp"

#include <array>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace sade {

// Aggregate send-probability thresholds for sector classification.
inline constexpr double rho_green = 5.0;
inline constexpr double rho_yellow = 5.0 * std::numbers::e;
inline constexpr double rho_red = 5.0 * std::numbers::e * std::numbers::e;

// Per-frame accounting: f_v counts the rounds that are not potentially busy
// at v, s_v the successful receptions. unjammed is the same predicate as
// f_v, kept as its own column for the throughput metric.
struct FrameMetrics {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;
    std::vector<std::uint64_t> f_v;
    std::vector<std::uint64_t> s_v;
    std::vector<std::uint64_t> unjammed;
};

// Splits the trace into frames of frame_len rounds (trailing partial frame
// included). frame_len 0 falls back to the config's frame_len, and failing
// that to one frame covering the whole run.
std::vector<FrameMetrics> frame_metrics(const Trace& trace, std::uint64_t frame_len = 0);

// sum_v s_v(F) / sum_v f_v(F) over [begin, end). A zero denominator is
// vacuously competitive: value 1 with the flag set.
struct CompetitiveResult {
    double value = 1.0;
    bool vacuous = false;
};

CompetitiveResult competitive_throughput(const Trace& trace, std::uint64_t begin, std::uint64_t end);
CompetitiveResult competitive_throughput(const Trace& trace);

// Mean over nodes of s_v / (rounds not jammed at v); nodes with no unjammed
// rounds are excluded and counted in excluded_nodes.
struct SimThroughput {
    double value = 0.0;
    std::uint32_t excluded_nodes = 0;
};

SimThroughput simulation_throughput(std::span<const std::uint64_t> s_v,
                                    std::span<const std::uint64_t> unjammed_v);
SimThroughput simulation_throughput(const Trace& trace);

// Sum of send probabilities. The accumulator is wide enough that the sum of
// identical initial probabilities is exact.
double aggregate_probability(std::span<const SadeState> states);
double aggregate_probability(std::span<const SadeState> states, std::span<const NodeId> subset);

// Protocol states entering round `round`, reconstructed from the trace's
// observations (SADE runs only).
std::vector<SadeState> replay_states_at(const Trace& trace, std::uint64_t round);

enum class SectorClass : std::uint8_t { green, yellow, red, exceeded };

SectorClass classify_sector(double p_s) noexcept;

// Aggregate probability of the six equal-angle sectors of the transmission
// disk around v at the start of `round`. Sector 0 starts at angle 0 from the
// positive x axis; an angle exactly on a boundary joins the lower sector.
struct SectorDiagnostics {
    std::array<double, 6> p_s{};
    std::array<SectorClass, 6> cls{};
    std::array<std::uint32_t, 6> node_count{};
};

SectorDiagnostics sector_diagnostics(const Trace& trace, const GridIndex& index, NodeId v,
                                     std::uint64_t round);
SectorDiagnostics sector_diagnostics(const Topology& topo, const GridIndex& index,
                                     const PhysicalConfig& phys, std::span<const SadeState> states,
                                     NodeId v);

// A round is open for v when v and at least one node in its transmission
// range are both below the potentially-busy noise level.
struct OpenRoundStats {
    std::vector<std::uint64_t> open_v;
};

OpenRoundStats open_rounds(const Trace& trace, const GridIndex& index);

// Stricter, off-by-default budget verification: every *sliding* window of T
// rounds stays within B*T. Aligned-exact strategies (reg) may legitimately
// fail this; bursty and constant ones satisfy it.
bool sliding_budget_ok(const Trace& trace, double tolerance = 1e-9);

// CSV emitters.
// Per-frame summary: frame,node,f_v,s_v,unjammed
void write_frame_metrics_csv(const Trace& trace, std::ostream& out, std::uint64_t frame_len = 0);
// Per-round aggregates: round,aggregate_p,receptions,idle_count
void write_round_aggregates_csv(const Trace& trace, std::ostream& out);

} // namespace sade
