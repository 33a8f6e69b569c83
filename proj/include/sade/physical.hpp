#pragma once

#include "sade/errors.hpp"

namespace sade {

// Physical-layer constants. alpha is the path-loss exponent, beta the SINR
// acceptance threshold, theta the carrier-sense noise threshold, power the
// fixed transmit power, epsilon the jamming slack constant.
struct PhysicalConfig {
    double alpha = 3.0;
    double beta = 2.0;
    double theta = 1.0;
    double power = 8.0;
    double epsilon = 1.0 / 3.0;

    // Optional far-field cutoff: interference contributions below this
    // per-node power are dropped. 0 disables (exact sums, the default).
    // Worst-case absolute error of a cutoff sum is n * cutoff_delta.
    double cutoff_delta = 0.0;

    // Noise at or above this level makes a round potentially busy.
    double jam_threshold() const noexcept { return (1.0 - epsilon) * theta; }

    double cutoff_error_bound(std::size_t n) const noexcept {
        return cutoff_delta * static_cast<double>(n);
    }

    void validate() const {
        if (!(alpha > 2.0))
            throw ConfigError("physical.alpha: must be > 2, got " + std::to_string(alpha));
        if (!(beta > 1.0))
            throw ConfigError("physical.beta: must be > 1, got " + std::to_string(beta));
        if (!(theta > 0.0))
            throw ConfigError("physical.theta: must be > 0, got " + std::to_string(theta));
        if (!(power > 0.0))
            throw ConfigError("physical.power: must be > 0, got " + std::to_string(power));
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw ConfigError("physical.epsilon: must be in (0,1), got " + std::to_string(epsilon));
        if (!(cutoff_delta >= 0.0))
            throw ConfigError("physical.cutoff_delta: must be >= 0");
    }
};

} // namespace sade
