#include "sade/sinr.hpp"

#include <algorithm>
#include <array>

namespace sade {

namespace {

// Path-loss specializations. Selecting once per round keeps the hot loop
// free of the alpha dispatch; every caller sees the same arithmetic.
struct AttenCube {
    double power;
    double operator()(double d2) const noexcept { return power / (d2 * std::sqrt(d2)); }
};
struct AttenQuartic {
    double power;
    double operator()(double d2) const noexcept { return power / (d2 * d2); }
};
struct AttenGeneric {
    double power;
    double neg_half_alpha;
    double operator()(double d2) const noexcept { return power * std::pow(d2, neg_half_alpha); }
};

struct ReceiverResult {
    double total = 0.0;
    double best = 0.0;
    double second = 0.0;
    std::uint32_t best_idx = 0;
    std::uint32_t count = 0;
};

template <class Atten>
ReceiverResult scan_transmitters(const Position& pv, std::span<const double> tx_x,
                                 std::span<const double> tx_y, double w, double h,
                                 double noise_v, Atten atten) noexcept {
    ReceiverResult r;
    r.total = noise_v;
    const std::size_t m = tx_x.size();
    for (std::size_t j = 0; j < m; ++j) {
        const double dx = wrap_delta(pv.x, tx_x[j], w);
        const double dy = wrap_delta(pv.y, tx_y[j], h);
        const double sig = atten(dx * dx + dy * dy);
        r.total += sig;
        if (sig > r.best) {
            r.second = r.best;
            r.best = sig;
            r.best_idx = static_cast<std::uint32_t>(j);
        } else if (sig > r.second) {
            r.second = sig;
        }
    }
    r.count = static_cast<std::uint32_t>(m);
    return r;
}

// Reception rule of the model: the strongest transmitter wins iff its signal
// meets beta times everything else. With beta > 1 no weaker transmitter can
// also qualify; `unique` reports whether that held numerically.
Observation classify(const ReceiverResult& r, std::span<const NodeId> tx_ids,
                     const PhysicalConfig& phys, bool& unique) noexcept {
    unique = true;
    if (r.count > 0) {
        double denom = r.total - r.best;
        if (denom < 0.0) denom = 0.0;
        if (r.best >= phys.beta * denom) {
            if (r.count > 1) {
                double denom2 = r.total - r.second;
                if (denom2 < 0.0) denom2 = 0.0;
                if (r.second >= phys.beta * denom2) unique = false;
            }
            return Observation::received(tx_ids[r.best_idx]);
        }
    }
    return r.total >= phys.theta ? Observation::busy() : Observation::idle();
}

template <class Atten>
ReceiverResult scan_one_generic(NodeId v, const RoundActivity& activity, const Topology& topo,
                                Atten atten, std::optional<NodeId> exclude,
                                std::vector<NodeId>* kept_ids) {
    ReceiverResult r;
    r.total = activity.noise[v];
    const Position& pv = topo.pos(v);
    const double w = topo.width(), h = topo.height();
    for (NodeId u : activity.transmitters) {
        if (u == v || (exclude && u == *exclude)) continue;
        const double sig = atten(torus_dist2(pv, topo.pos(u), w, h));
        r.total += sig;
        if (kept_ids) kept_ids->push_back(u);
        if (sig > r.best) {
            r.second = r.best;
            r.best = sig;
            r.best_idx = r.count;
        } else if (sig > r.second) {
            r.second = sig;
        }
        ++r.count;
    }
    return r;
}

template <class Fn>
auto with_atten(const PhysicalConfig& phys, Fn&& fn) {
    if (phys.alpha == 3.0) return fn(AttenCube{phys.power});
    if (phys.alpha == 4.0) return fn(AttenQuartic{phys.power});
    return fn(AttenGeneric{phys.power, -0.5 * phys.alpha});
}

} // namespace

double interference_at(NodeId v, const RoundActivity& activity, const Topology& topo,
                       const GridIndex& index, const PhysicalConfig& phys,
                       std::optional<NodeId> exclude) {
    if (exclude && *exclude == v)
        throw SimError("interference_at: excluded node equals the receiver");

    if (phys.cutoff_delta > 0.0) {
        // Far-field cutoff: only transmitters whose contribution reaches
        // cutoff_delta are summed. The grid prunes the candidate set; the
        // per-candidate test keeps the semantics exact.
        const double r_cut = std::pow(phys.power / phys.cutoff_delta, 1.0 / phys.alpha);
        std::vector<std::uint32_t> cells;
        index.cells_near(topo.pos(v), r_cut, cells);
        std::vector<NodeId> candidates;
        for (std::uint32_t cell : cells)
            for (NodeId u : index.bucket(cell))
                if (activity.is_transmitter[u] && u != v && !(exclude && u == *exclude))
                    candidates.push_back(u);
        std::sort(candidates.begin(), candidates.end());
        const Position& pv = topo.pos(v);
        double total = activity.noise[v];
        return with_atten(phys, [&](auto atten) {
            for (NodeId u : candidates) {
                const double sig = atten(torus_dist2(pv, topo.pos(u), topo.width(), topo.height()));
                if (sig >= phys.cutoff_delta) total += sig;
            }
            return total;
        });
    }

    return with_atten(phys, [&](auto atten) {
        return scan_one_generic(v, activity, topo, atten, exclude, nullptr).total;
    });
}

Channel carrier_sense(NodeId v, const RoundActivity& activity, const Topology& topo,
                      const GridIndex& index, const PhysicalConfig& phys) {
    if (activity.is_transmitter[v])
        throw SimError("carrier_sense: node is transmitting this round");
    const double power = interference_at(v, activity, topo, index, phys);
    return power >= phys.theta ? Channel::busy : Channel::idle;
}

std::optional<NodeId> try_receive(NodeId v, const RoundActivity& activity, const Topology& topo,
                                  const GridIndex& index, const PhysicalConfig& phys) {
    (void)index;
    if (activity.is_transmitter[v])
        throw SimError("try_receive: node is transmitting this round");
    const ObservationOutcome out = observe_one(v, activity, topo, phys);
    if (out.obs.kind == ObsKind::received)
        return out.obs.sender;
    return std::nullopt;
}

ObservationOutcome observe_one(NodeId v, const RoundActivity& activity, const Topology& topo,
                               const PhysicalConfig& phys) {
    std::vector<NodeId> kept;
    kept.reserve(activity.transmitters.size());
    return with_atten(phys, [&](auto atten) {
        kept.clear();
        const ReceiverResult r = scan_one_generic(v, activity, topo, atten, std::nullopt, &kept);
        ObservationOutcome out;
        out.total_power = r.total;
        out.obs = classify(r, kept, phys, out.second_best_ok);
        return out;
    });
}

namespace {

template <class Atten>
void observe_all_impl(const RoundActivity& activity, const Topology& topo,
                      const PhysicalConfig& phys, ObserveScratch& scratch,
                      std::span<Observation> obs, bool& uniqueness_ok, Atten atten,
                      bool parallel) {
    const std::size_t n = topo.size();
    const std::size_t m = activity.transmitters.size();
    scratch.tx_x.resize(m);
    scratch.tx_y.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const Position& p = topo.pos(activity.transmitters[j]);
        scratch.tx_x[j] = p.x;
        scratch.tx_y[j] = p.y;
    }
    const double w = topo.width(), h = topo.height();
    std::span<const double> txx(scratch.tx_x), txy(scratch.tx_y);
    int violations = 0;

#pragma omp parallel for schedule(static) reduction(+ : violations) if (parallel)
    for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) {
        const auto id = static_cast<NodeId>(v);
        if (activity.is_transmitter[id]) {
            obs[id] = Observation::sent();
            continue;
        }
        const ReceiverResult r =
            scan_transmitters(topo.pos(id), txx, txy, w, h, activity.noise[id], atten);
        bool unique = true;
        obs[id] = classify(r, activity.transmitters, phys, unique);
        if (!unique) ++violations;
    }
    uniqueness_ok = violations == 0;
}

// Cutoff variant: per receiver, only grid cells within the cutoff radius
// are visited, and contributions below cutoff_delta are dropped, matching
// interference_at's cutoff semantics. Candidates are sorted so the sum
// order stays ascending id.
template <class Atten>
void observe_all_cutoff_impl(const RoundActivity& activity, const Topology& topo,
                             const GridIndex& index, const PhysicalConfig& phys,
                             std::span<Observation> obs, bool& uniqueness_ok, Atten atten,
                             bool parallel) {
    const std::size_t n = topo.size();
    const double w = topo.width(), h = topo.height();
    const double r_cut = std::pow(phys.power / phys.cutoff_delta, 1.0 / phys.alpha);
    int violations = 0;

#pragma omp parallel if (parallel)
    {
        std::vector<std::uint32_t> cells;
        std::vector<NodeId> candidates;
#pragma omp for schedule(static) reduction(+ : violations)
        for (std::int64_t v = 0; v < static_cast<std::int64_t>(n); ++v) {
            const auto id = static_cast<NodeId>(v);
            if (activity.is_transmitter[id]) {
                obs[id] = Observation::sent();
                continue;
            }
            cells.clear();
            candidates.clear();
            const Position& pv = topo.pos(id);
            index.cells_near(pv, r_cut, cells);
            for (std::uint32_t cell : cells)
                for (NodeId u : index.bucket(cell))
                    if (activity.is_transmitter[u])
                        candidates.push_back(u);
            std::sort(candidates.begin(), candidates.end());

            ReceiverResult r;
            r.total = activity.noise[id];
            NodeId best_id = 0;
            for (NodeId u : candidates) {
                const double sig = atten(torus_dist2(pv, topo.pos(u), w, h));
                if (sig < phys.cutoff_delta)
                    continue;
                r.total += sig;
                if (sig > r.best) {
                    r.second = r.best;
                    r.best = sig;
                    best_id = u;
                } else if (sig > r.second) {
                    r.second = sig;
                }
                ++r.count;
            }
            r.best_idx = 0;
            const std::array<NodeId, 1> ids{best_id};
            bool unique = true;
            obs[id] = classify(r, ids, phys, unique);
            if (!unique) ++violations;
        }
    }
    uniqueness_ok = violations == 0;
}

} // namespace

void observe_all_serial(const RoundActivity& activity, const Topology& topo,
                        const GridIndex& index, const PhysicalConfig& phys,
                        ObserveScratch& scratch, std::span<Observation> obs,
                        bool& uniqueness_ok) {
    with_atten(phys, [&](auto atten) {
        if (phys.cutoff_delta > 0.0)
            observe_all_cutoff_impl(activity, topo, index, phys, obs, uniqueness_ok, atten,
                                    false);
        else
            observe_all_impl(activity, topo, phys, scratch, obs, uniqueness_ok, atten, false);
        return 0;
    });
}

void observe_all_parallel(const RoundActivity& activity, const Topology& topo,
                          const GridIndex& index, const PhysicalConfig& phys,
                          ObserveScratch& scratch, std::span<Observation> obs,
                          bool& uniqueness_ok) {
    with_atten(phys, [&](auto atten) {
        if (phys.cutoff_delta > 0.0)
            observe_all_cutoff_impl(activity, topo, index, phys, obs, uniqueness_ok, atten,
                                    true);
        else
            observe_all_impl(activity, topo, phys, scratch, obs, uniqueness_ok, atten, true);
        return 0;
    });
}

} // namespace sade
