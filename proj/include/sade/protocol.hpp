#pragma once

#include "sade/errors.hpp"
#include "sade/rng.hpp"
#include "sade/sinr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace sade {

enum class Action : std::uint8_t { listen = 0, transmit = 1 };

struct SadeParams {
    double gamma = 0.1;   // multiplicative step
    double p_hat = 1.0 / 24.0; // send-probability cap

    void validate() const {
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw ConfigError("sade.gamma: must be in (0,1], got " + std::to_string(gamma));
        if (!(p_hat > 0.0 && p_hat < 1.0))
            throw ConfigError("sade.p_hat: must be in (0,1), got " + std::to_string(p_hat));
    }
};

// Default step size: 1 / (log2 T + log2 log2 n), clamped to [0.01, 0.5].
inline double default_gamma(std::uint64_t window_T, std::uint64_t n) noexcept {
    const double lt = std::log2(std::max<double>(2.0, static_cast<double>(window_T)));
    const double lln = std::log2(std::max(1.0, std::log2(std::max<double>(2.0, static_cast<double>(n)))));
    return std::clamp(1.0 / (lt + lln), 0.01, 0.5);
}

// Per-node protocol state: send probability p, window estimate T_est with
// counter c, and whether an idle step was seen in the current window.
struct SadeState {
    double p = 0.0;
    std::uint64_t T_est = 1;
    std::uint64_t c = 1;
    bool idle_in_window = false;

    bool operator==(const SadeState&) const = default;
};

inline SadeState sade_init(const SadeParams& params) {
    params.validate();
    return SadeState{params.p_hat, 1, 1, false};
}

// Consumes exactly one draw per call.
inline Action sade_decide(const SadeState& state, SubstreamRng& rng) noexcept {
    return rng.bernoulli(state.p) ? Action::transmit : Action::listen;
}

// State transition for the round that just ended, given this node's own
// observation. Steps, in order:
//   1. received: p /= (1+gamma).
//      idle:     p = min((1+gamma)p, p_hat), T_est = max(1, T_est-1),
//                and the idle flag is set.
//      busy/sent: no change.
//   2. c += 1; once c overruns T_est the window wraps: c = 1, and if no
//      idle step was seen, p /= (1+gamma) and T_est += 2.
inline SadeState sade_update(SadeState state, Observation obs, const SadeParams& params) noexcept {
    const double up = 1.0 + params.gamma;
    switch (obs.kind) {
    case ObsKind::received:
        state.p = state.p / up;
        break;
    case ObsKind::idle:
        state.p = std::min(up * state.p, params.p_hat);
        state.T_est = std::max<std::uint64_t>(1, state.T_est - 1);
        state.idle_in_window = true;
        break;
    case ObsKind::busy:
    case ObsKind::sent:
        break;
    }
    state.c += 1;
    if (state.c > state.T_est) {
        state.c = 1;
        if (!state.idle_in_window) {
            state.p = state.p / up;
            state.T_est += 2;
        }
        state.idle_in_window = false;
    }
    return state;
}

// Slotted binary-exponential-backoff baseline. No carrier-model feedback
// exists for a sender, so success is supplied by the engine as an oracle
// "did anyone receive this" bit.
struct BackoffParams {
    std::uint32_t cw_min = 2;
    std::uint32_t cw_max = 1024;

    void validate() const {
        if (cw_min < 1 || cw_max < cw_min)
            throw ConfigError("backoff: need 1 <= cw_min <= cw_max");
    }
};

struct BackoffState {
    std::uint32_t cw = 2;
    std::uint32_t timer = 0;

    bool operator==(const BackoffState&) const = default;
};

inline BackoffState backoff_init(const BackoffParams& params, SubstreamRng& rng) {
    params.validate();
    BackoffState s;
    s.cw = params.cw_min;
    s.timer = static_cast<std::uint32_t>(rng.next_below(s.cw));
    return s;
}

inline Action backoff_decide(const BackoffState& state) noexcept {
    return state.timer == 0 ? Action::transmit : Action::listen;
}

// Sent + delivered resets the window; sent + undelivered doubles it. Both
// redraw the timer. A listener decrements its timer only on idle.
inline BackoffState backoff_update(BackoffState state, Observation obs, bool delivered,
                                   const BackoffParams& params, SubstreamRng& rng) noexcept {
    if (obs.kind == ObsKind::sent) {
        state.cw = delivered ? params.cw_min : std::min(state.cw * 2, params.cw_max);
        state.timer = static_cast<std::uint32_t>(rng.next_below(state.cw));
    } else if (obs.kind == ObsKind::idle && state.timer > 0) {
        state.timer -= 1;
    }
    return state;
}

} // namespace sade
