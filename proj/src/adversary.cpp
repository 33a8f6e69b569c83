#include "sade/adversary.hpp"

#include <algorithm>
#include <cmath>

namespace sade {

namespace {

// Random (Reg) jammer: each round each node is jammed with probability
// epsilon at level B/epsilon. Spending is clamped so a window never
// overruns B*T, and the tail of each window is force-spent so the budget
// is used up exactly. The strided variant replaces the coin with a
// deterministic hit every ceil(1/epsilon)-th round.
class RegJammer final : public JammerStrategy {
public:
    RegJammer(const AdversaryConfig& cfg, std::uint64_t seed, std::uint32_t n)
        : cfg_(cfg),
          level_(cfg.budget / cfg.epsilon),
          target_(cfg.budget * static_cast<double>(cfg.window)),
          stride_(static_cast<std::uint64_t>(std::ceil(1.0 / cfg.epsilon))),
          remaining_(n, cfg.budget * static_cast<double>(cfg.window)),
          shared_(seed, 0xFFFFFFFFu, StreamPurpose::adversary) {
        streams_.reserve(n);
        for (std::uint32_t v = 0; v < n; ++v)
            streams_.emplace_back(seed, v, StreamPurpose::adversary);
    }

    void fill(const AdversaryView& view, std::span<double> out) override {
        const std::uint64_t k = view.round % cfg_.window;
        if (k == 0)
            std::fill(remaining_.begin(), remaining_.end(), target_);
        const double rounds_after = static_cast<double>(cfg_.window - 1 - k);
        bool shared_hit = false;
        if (cfg_.uniform)
            shared_hit = cfg_.strided ? (k % stride_ == stride_ - 1) : shared_.bernoulli(cfg_.epsilon);
        for (std::size_t v = 0; v < out.size(); ++v) {
            bool hit;
            if (cfg_.uniform)
                hit = shared_hit;
            else if (cfg_.strided)
                hit = k % stride_ == stride_ - 1;
            else
                hit = streams_[v].bernoulli(cfg_.epsilon);
            const double rem = remaining_[v];
            // Minimum spend that keeps the remainder coverable by the
            // rounds still left in this window.
            const double forced = std::max(0.0, rem - rounds_after * level_);
            const double spend = hit ? std::min(level_, rem) : forced;
            out[v] = spend;
            remaining_[v] = rem - spend;
        }
    }

private:
    AdversaryConfig cfg_;
    double level_;
    double target_;
    std::uint64_t stride_;
    std::vector<double> remaining_;
    SubstreamRng shared_;
    std::vector<SubstreamRng> streams_;
};

// Bursty (Bur) jammer: the first floor(eps*T) rounds of every window carry
// B/eps at every node; a fractional remainder of eps*T is spent on the next
// round at reduced level, keeping the window total at exactly B*T.
class BurJammer final : public JammerStrategy {
public:
    explicit BurJammer(const AdversaryConfig& cfg)
        : window_(cfg.window), level_(cfg.budget / cfg.epsilon) {
        const double jammed = cfg.epsilon * static_cast<double>(cfg.window);
        full_rounds_ = static_cast<std::uint64_t>(jammed);
        fraction_ = jammed - static_cast<double>(full_rounds_);
        if (full_rounds_ > window_) { // eps == 1 exactly
            full_rounds_ = window_;
            fraction_ = 0.0;
        }
    }

    void fill(const AdversaryView& view, std::span<double> out) override {
        const std::uint64_t k = view.round % window_;
        double value = 0.0;
        if (k < full_rounds_)
            value = level_;
        else if (k == full_rounds_ && fraction_ > 0.0)
            value = fraction_ * level_;
        std::fill(out.begin(), out.end(), value);
    }

private:
    std::uint64_t window_;
    double level_;
    std::uint64_t full_rounds_;
    double fraction_;
};

class ConstantJammer final : public JammerStrategy {
public:
    explicit ConstantJammer(double level) : level_(level) {}

    void fill(const AdversaryView&, std::span<double> out) override {
        std::fill(out.begin(), out.end(), level_);
    }

private:
    double level_;
};

} // namespace

std::unique_ptr<JammerStrategy> make_jammer(const AdversaryConfig& cfg, std::uint64_t seed,
                                            std::uint32_t n) {
    cfg.validate();
    switch (cfg.kind) {
    case JammerKind::reg:
        return std::make_unique<RegJammer>(cfg, seed, n);
    case JammerKind::bur:
        return std::make_unique<BurJammer>(cfg);
    case JammerKind::constant:
        return std::make_unique<ConstantJammer>(cfg.level);
    }
    throw ConfigError("unknown jammer kind");
}

BudgetLedger::BudgetLedger(double budget, std::uint64_t window, std::uint32_t n)
    : window_budget_(budget * static_cast<double>(window)), window_(window), spent_(n, 0.0) {}

void BudgetLedger::charge(std::uint64_t round, std::span<const double> noise) {
    const std::uint64_t k = round % window_;
    if (k == 0)
        std::fill(spent_.begin(), spent_.end(), 0.0);
    for (std::size_t v = 0; v < noise.size(); ++v) {
        if (!(noise[v] >= 0.0))
            throw SimError("adversary emitted negative noise at node " + std::to_string(v));
        spent_[v] += noise[v];
        if (spent_[v] > window_budget_ + tolerance)
            throw SimError("adversary exceeded window budget at node " + std::to_string(v) +
                           ": spent " + std::to_string(spent_[v]) + " > " +
                           std::to_string(window_budget_));
    }
    if (k == window_ - 1) {
        ++windows_completed_;
        for (double s : spent_)
            if (std::fabs(s - window_budget_) > tolerance) {
                exact_ = false;
                break;
            }
    }
}

Adversary::Adversary(const AdversaryConfig& cfg, std::uint64_t seed, std::uint32_t n)
    : cfg_(cfg),
      strategy_(make_jammer(cfg, seed, n)),
      ledger_(cfg.effective_budget(), cfg.window, n) {}

void Adversary::noise_for_round(const AdversaryView& view, std::span<double> out) {
    strategy_->fill(view, out);
    ledger_.charge(view.round, out);
}

} // namespace sade
