#pragma once

#include "sade/physical.hpp"
#include "sade/topology.hpp"

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace sade {

enum class ObsKind : std::uint8_t { received = 0, busy = 1, idle = 2, sent = 3 };

// What a node experienced in one round. `sender` is meaningful only for
// `received`; a node observes `sent` iff it transmitted (it cannot sense
// the channel in the same round).
struct Observation {
    ObsKind kind = ObsKind::idle;
    NodeId sender = 0;

    static Observation received(NodeId u) { return {ObsKind::received, u}; }
    static Observation busy() { return {ObsKind::busy, 0}; }
    static Observation idle() { return {ObsKind::idle, 0}; }
    static Observation sent() { return {ObsKind::sent, 0}; }

    bool operator==(const Observation&) const = default;
};

// Channel state for one round: who transmits, and the adversarial noise
// level at every node.
struct RoundActivity {
    std::span<const NodeId> transmitters;   // ascending ids
    std::span<const std::uint8_t> is_transmitter; // length n
    std::span<const double> noise;          // ADV(v), length n
};

// Power of a signal after path loss, as a function of squared distance.
// Integral alpha gets a closed form; the general case goes through pow.
inline double attenuation(const PhysicalConfig& phys, double d2) noexcept {
    if (phys.alpha == 3.0) return phys.power / (d2 * std::sqrt(d2));
    if (phys.alpha == 4.0) return phys.power / (d2 * d2);
    return phys.power * std::pow(d2, -0.5 * phys.alpha);
}

// P / d^alpha. d = 0 is rejected: topologies guarantee distinct positions.
inline double received_power(const PhysicalConfig& phys, double d) {
    if (!(d > 0.0))
        throw ConfigError("received_power: distance must be > 0");
    return attenuation(phys, d * d);
}

// True iff adversarial noise alone nearly fills the sensing threshold.
inline bool potentially_busy(double adv_v, const PhysicalConfig& phys) noexcept {
    return adv_v >= phys.jam_threshold();
}

// ADV(v) plus the summed received power of all transmitters other than v and
// `exclude`. The sum runs in ascending transmitter id so results are
// bit-reproducible. With cutoff_delta > 0 only transmitters inside the grid
// cells reachable within the cutoff radius contribute.
double interference_at(NodeId v, const RoundActivity& activity, const Topology& topo,
                       const GridIndex& index, const PhysicalConfig& phys,
                       std::optional<NodeId> exclude = std::nullopt);

enum class Channel : std::uint8_t { busy, idle };

// Threshold sensing for a listening node; equality with theta counts as busy.
Channel carrier_sense(NodeId v, const RoundActivity& activity, const Topology& topo,
                      const GridIndex& index, const PhysicalConfig& phys);

// The unique transmitter whose SINR at v clears beta, if any. A zero
// denominator (no noise, no other interference) counts as success.
std::optional<NodeId> try_receive(NodeId v, const RoundActivity& activity, const Topology& topo,
                                  const GridIndex& index, const PhysicalConfig& phys);

// One receiver's round, fully classified. reception is checked before
// idle/busy sensing. second_best_ok reports that no runner-up transmitter
// also satisfied the SINR rule (always true when beta > 1; carried along so
// full runs can assert it).
struct ObservationOutcome {
    Observation obs;
    double total_power = 0.0; // ADV(v) + all transmitter power at v
    bool second_best_ok = true;
};

ObservationOutcome observe_one(NodeId v, const RoundActivity& activity, const Topology& topo,
                               const PhysicalConfig& phys);

// Whole-round observation kernel: fills obs[v] for every node (transmitters
// get `sent`). The parallel variant distributes receivers across OpenMP
// threads; per-receiver arithmetic is identical to the serial reference, so
// outputs match bit for bit. With cutoff_delta > 0 both variants switch to
// grid-pruned sums with the same per-contribution cutoff semantics as
// interference_at.
struct ObserveScratch {
    std::vector<double> tx_x, tx_y;
};

void observe_all_serial(const RoundActivity& activity, const Topology& topo,
                        const GridIndex& index, const PhysicalConfig& phys,
                        ObserveScratch& scratch, std::span<Observation> obs,
                        bool& uniqueness_ok);

void observe_all_parallel(const RoundActivity& activity, const Topology& topo,
                          const GridIndex& index, const PhysicalConfig& phys,
                          ObserveScratch& scratch, std::span<Observation> obs,
                          bool& uniqueness_ok);

} // namespace sade
