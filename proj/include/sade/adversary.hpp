#pragma once

#include "sade/errors.hpp"
#include "sade/protocol.hpp"
#include "sade/rng.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sade {

enum class JammerKind : std::uint8_t { reg = 0, bur = 1, constant = 2 };

// (B,T)-bounded jammer configuration. budget is the per-round average B;
// within every aligned window of `window` rounds at most budget*window
// energy may be placed per node.
struct AdversaryConfig {
    JammerKind kind = JammerKind::reg;
    double budget = 2.0 / 3.0;  // B
    std::uint64_t window = 60;  // T
    double epsilon = 1.0 / 3.0;
    bool uniform = false;  // one shared coin per round instead of per-node coins
    bool strided = false;  // deterministic every-ceil(1/eps)-th-round variant of reg
    double level = 0.0;    // constant jammer's per-round noise

    // Effective B for ledger accounting; the constant jammer is
    // (level, T)-bounded by construction.
    double effective_budget() const noexcept {
        return kind == JammerKind::constant ? level : budget;
    }

    void validate() const {
        if (window < 1)
            throw ConfigError("adversary.window: must be >= 1");
        switch (kind) {
        case JammerKind::reg:
            if (!(epsilon > 0.0 && epsilon < 1.0))
                throw ConfigError("adversary.epsilon: reg jammer needs epsilon in (0,1)");
            if (!(budget >= 0.0))
                throw ConfigError("adversary.budget: must be >= 0");
            // A jam level of B/eps must fit inside one window's budget,
            // otherwise every jammed round is a truncated correction.
            if (budget > 0.0 && epsilon * static_cast<double>(window) < 1.0)
                throw ConfigError("adversary: reg jammer needs epsilon*window >= 1 "
                                  "(single-round level B/epsilon exceeds the window budget)");
            break;
        case JammerKind::bur:
            if (!(epsilon > 0.0 && epsilon <= 1.0))
                throw ConfigError("adversary.epsilon: bur jammer needs epsilon in (0,1]");
            if (!(budget >= 0.0))
                throw ConfigError("adversary.budget: must be >= 0");
            break;
        case JammerKind::constant:
            if (!(level >= 0.0))
                throw ConfigError("adversary.level: must be >= 0");
            break;
        }
    }
};

// What an adaptive strategy may look at: the beginning-of-round protocol
// states and the actions of the previous round. Strategies must not mutate
// node state.
struct AdversaryView {
    std::uint64_t round = 0;
    std::span<const SadeState> sade_states;
    std::span<const BackoffState> backoff_states;
    std::span<const Action> prev_actions;
};

class JammerStrategy {
public:
    virtual ~JammerStrategy() = default;

    // Fills out[v] with ADV(v) for this round. Called once per round with
    // strictly increasing view.round.
    virtual void fill(const AdversaryView& view, std::span<double> out) = 0;

    // Whether every complete window is spent to exactly B*T.
    virtual bool exact_budget() const noexcept { return true; }
};

std::unique_ptr<JammerStrategy> make_jammer(const AdversaryConfig& cfg, std::uint64_t seed,
                                            std::uint32_t n);

// Aligned-window budget accounting. charge() enforces the (B,T) bound to
// 1e-9 absolute and tracks whether complete windows were spent exactly.
class BudgetLedger {
public:
    BudgetLedger(double budget, std::uint64_t window, std::uint32_t n);

    // noise must be the vector emitted for round `round`; rounds arrive in order.
    void charge(std::uint64_t round, std::span<const double> noise);

    bool all_complete_windows_exact() const noexcept { return exact_; }
    std::uint64_t windows_completed() const noexcept { return windows_completed_; }
    double window_budget() const noexcept { return window_budget_; }

    static constexpr double tolerance = 1e-9;

private:
    double window_budget_;
    std::uint64_t window_;
    std::vector<double> spent_;
    std::uint64_t windows_completed_ = 0;
    bool exact_ = true;
};

// Strategy plus ledger; the engine's round loop calls noise_for_round once
// per round. A strategy overspending its budget is an internal error and
// aborts the run.
class Adversary {
public:
    Adversary(const AdversaryConfig& cfg, std::uint64_t seed, std::uint32_t n);

    void noise_for_round(const AdversaryView& view, std::span<double> out);

    const AdversaryConfig& config() const noexcept { return cfg_; }
    const BudgetLedger& ledger() const noexcept { return ledger_; }
    bool exact_budget() const noexcept { return strategy_->exact_budget(); }

private:
    AdversaryConfig cfg_;
    std::unique_ptr<JammerStrategy> strategy_;
    BudgetLedger ledger_;
};

} // namespace sade
