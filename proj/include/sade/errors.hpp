#pragma once

#include <stdexcept>
#include <string>

namespace sade {

// Invalid user-supplied configuration (bad key, value out of range, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Internal consistency failure during a run (e.g. an adversary strategy
// exceeding its own budget). Not recoverable; the run aborts.
class SimError : public std::runtime_error {
public:
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace sade
