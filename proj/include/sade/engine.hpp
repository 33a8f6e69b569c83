#pragma once

#include "sade/adversary.hpp"
#include "sade/physical.hpp"
#include "sade/protocol.hpp"
#include "sade/sinr.hpp"
#include "sade/topology.hpp"

#include <optional>
#include <span>
#include <vector>

namespace sade {

enum class ProtocolKind : std::uint8_t { sade = 0, backoff = 1 };

enum class ScenarioKind : std::uint8_t { uniform = 0, het = 1, explicit_list = 2 };

// How to obtain node positions. Placement draws come from a dedicated
// substream of the run seed, so the same seed yields the same topology no
// matter which protocol or adversary runs on it.
struct TopologySpec {
    ScenarioKind kind = ScenarioKind::uniform;
    std::uint32_t n = 500;
    double width = 25.0;
    double height = 25.0;
    std::uint32_t grid_side = 5;
    double sub_size = 5.0;
    std::uint32_t lambda_min = 20;
    std::uint32_t lambda_max = 1000;
    std::vector<Position> positions; // explicit_list only

    void validate() const;
};

struct BuiltTopology {
    Topology topo;
    std::vector<std::uint32_t> het_cell; // per node sub-square, het only
};

BuiltTopology build_topology(const TopologySpec& spec, std::uint64_t seed);

struct SimConfig {
    TopologySpec topology;
    PhysicalConfig phys;
    AdversaryConfig adversary;
    ProtocolKind protocol = ProtocolKind::sade;
    SadeParams sade;
    bool gamma_auto = true; // derive gamma from window/n at run start
    BackoffParams backoff;
    std::uint64_t rounds = 3000;
    std::uint64_t seed = 1;
    std::uint64_t frame_len = 0; // 0: one frame spanning the whole run
    double grid_cell = 0.0;      // grid index cell size; 0: R1
    bool parallel = true;        // OpenMP observation kernel

    void validate() const;
};

// Everything observable about one finished round. Spans are valid only for
// the duration of the callback.
struct RoundView {
    std::uint64_t round = 0;
    std::uint32_t n = 0;
    std::span<const Action> actions;
    std::span<const Observation> obs;
    std::span<const double> noise;
    std::span<const std::uint8_t> pot_busy;
    std::span<const std::uint8_t> delivered; // per sender: anyone received it
    std::span<const SadeState> sade_before;  // states entering the round
    std::span<const SadeState> sade_after;   // states after the update step
};

class RoundSink {
public:
    virtual ~RoundSink() = default;
    virtual void on_round(const RoundView& view) = 0;
    virtual void on_finish() {}
};

// Full per-round record of a run, column layout round-major: index t*n + v.
struct Trace {
    SimConfig config; // effective config (gamma resolved)
    Topology topo;
    std::vector<std::uint32_t> het_cell;
    std::uint32_t n = 0;
    std::uint64_t rounds = 0;
    std::vector<Action> actions;
    std::vector<Observation> obs;
    std::vector<double> noise;
    std::vector<std::uint8_t> pot_busy;
    std::vector<SadeState> final_sade;
    std::vector<BackoffState> final_backoff;

    std::size_t at(std::uint64_t t, NodeId v) const noexcept { return t * n + v; }
};

struct RunStats {
    std::uint32_t n = 0;
    std::uint64_t rounds = 0;
    std::uint64_t seed = 0;
    double gamma_effective = 0.0;
    std::vector<std::uint64_t> s_v;        // successful receptions per node
    std::vector<std::uint64_t> unjammed_v; // rounds not potentially busy per node
    std::uint64_t receptions_total = 0;
    bool uniqueness_ok = true;  // no round produced two admissible senders
    bool ledger_exact = true;   // complete windows spent to exactly B*T
    std::uint64_t trace_hash = 0;
    std::uint64_t noise_hash = 0; // hash of the jam schedule alone
    double initial_aggregate = 0.0;
    std::vector<double> aggregate_p; // per-round sum of p_v, if requested
    std::vector<std::uint32_t> receptions_per_round; // with record_convergence
    std::vector<std::uint32_t> idles_per_round;      // with record_convergence
};

struct RunOptions {
    bool record_trace = true;
    bool record_convergence = false;
    std::vector<RoundSink*> sinks;
};

struct RunResult {
    std::optional<Trace> trace;
    RunStats stats;
};

// Executes one run. Round phases, in order: adversary noise from the
// beginning-of-round snapshot, node decisions, observations, state updates,
// recording. Bit-deterministic in (config, seed) regardless of thread count.
RunResult run(const SimConfig& config, const RunOptions& options = {});

// Independent runs over a seed list; seeds are dispatched to OpenMP workers.
std::vector<RunResult> run_batch(const SimConfig& config, std::span<const std::uint64_t> seeds,
                                 const RunOptions& options = {});

// gamma actually used by a run of this config (resolves gamma_auto).
double effective_gamma(const SimConfig& config, std::uint32_t n);

} // namespace sade
