#include "sade/adversary.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sade;

namespace {

// Drives a strategy for `rounds` rounds over n nodes and returns the noise
// matrix (round-major).
std::vector<std::vector<double>> drive(const AdversaryConfig& cfg, std::uint64_t seed,
                                       std::uint32_t n, std::uint64_t rounds) {
    Adversary adv(cfg, seed, n);
    std::vector<std::vector<double>> noise(rounds, std::vector<double>(n));
    for (std::uint64_t t = 0; t < rounds; ++t) {
        AdversaryView view;
        view.round = t;
        adv.noise_for_round(view, noise[t]);
    }
    return noise;
}

double window_spend(const std::vector<std::vector<double>>& noise, std::uint64_t window,
                    std::uint64_t k, std::uint32_t v) {
    double total = 0.0;
    for (std::uint64_t t = k * window; t < (k + 1) * window; ++t)
        total += noise[t][v];
    return total;
}

} // namespace

TEST_SUITE_BEGIN("adversary");

TEST_CASE("reg jammer: levels, accounting identity and determinism") {
    AdversaryConfig cfg; // reg, B=2/3, T=60, eps=1/3
    const double level = cfg.budget / cfg.epsilon;
    CHECK(level == 2.0);

    const auto noise = drive(cfg, 42, 8, 600);
    std::uint64_t full_level_rounds = 0, correction_rounds = 0;
    for (const auto& row : noise)
        for (double x : row) {
            if (x == 0.0 || x == level)
                full_level_rounds += x == level;
            else
                ++correction_rounds;
        }
    // expected jams per window per node: eps*T = 20, so 10 windows * 8 nodes
    // give ~1600 full-level rounds; corrections happen only near window ends
    CHECK(full_level_rounds > 1200);
    CHECK(correction_rounds < 400);

    for (std::uint64_t k = 0; k < 10; ++k)
        for (std::uint32_t v = 0; v < 8; ++v)
            CHECK(window_spend(noise, cfg.window, k, v) ==
                  doctest::Approx(cfg.budget * 60.0).epsilon(1e-12)); // = 40

    CHECK(noise == drive(cfg, 42, 8, 600));
    CHECK(noise != drive(cfg, 43, 8, 600));
}

TEST_CASE("reg jammer: zero budget means silence") {
    AdversaryConfig cfg;
    cfg.budget = 0.0;
    for (const auto& row : drive(cfg, 1, 4, 120))
        for (double x : row)
            CHECK(x == 0.0);
}

TEST_CASE("reg jammer: long-run frequency approaches epsilon") {
    AdversaryConfig cfg;
    const std::uint64_t rounds = 6000;
    const auto noise = drive(cfg, 7, 2, rounds);
    for (std::uint32_t v = 0; v < 2; ++v) {
        std::uint64_t jammed = 0;
        for (const auto& row : noise)
            jammed += row[v] > 0.0;
        const double sigma = std::sqrt(rounds * cfg.epsilon * (1 - cfg.epsilon));
        CHECK(std::fabs(static_cast<double>(jammed) - rounds * cfg.epsilon) <= 3.0 * sigma);
    }
}

TEST_CASE("reg jammer: uniform flag yields identical noise across nodes") {
    AdversaryConfig cfg;
    cfg.uniform = true;
    for (const auto& row : drive(cfg, 9, 16, 240))
        for (double x : row)
            CHECK(x == row[0]);
}

TEST_CASE("reg jammer: strided variant jams every ceil(1/eps)-th round") {
    AdversaryConfig cfg;
    cfg.strided = true; // eps = 1/3 -> stride 3
    const auto noise = drive(cfg, 1, 2, 120);
    for (std::uint64_t t = 0; t < 120; ++t) {
        if (t % 3 == 2)
            CHECK(noise[t][0] == 2.0);
        else
            CHECK(noise[t][0] == 0.0);
    }
    for (std::uint64_t k = 0; k < 2; ++k)
        CHECK(window_spend(noise, cfg.window, k, 0) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("reg jammer rejects a level that cannot fit one window") {
    AdversaryConfig cfg;
    cfg.epsilon = 0.01; // eps*T = 0.6 < 1
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("bur jammer: burst prefix then silence") {
    AdversaryConfig cfg;
    cfg.kind = JammerKind::bur; // eps*T = 20 full rounds at level 2
    const auto noise = drive(cfg, 1, 3, 180);
    for (std::uint64_t t = 0; t < 180; ++t) {
        const std::uint64_t k = t % 60;
        for (double x : noise[t])
            CHECK(x == (k < 20 ? 2.0 : 0.0));
    }
    for (std::uint64_t k = 0; k < 3; ++k)
        CHECK(window_spend(noise, 60, k, 1) == doctest::Approx(40.0).epsilon(1e-12));
}

TEST_CASE("bur jammer: epsilon 1 degenerates to a constant level B") {
    AdversaryConfig cfg;
    cfg.kind = JammerKind::bur;
    cfg.epsilon = 1.0;
    cfg.budget = 0.4;
    for (const auto& row : drive(cfg, 1, 2, 120))
        for (double x : row)
            CHECK(x == doctest::Approx(0.4).epsilon(1e-15));
}

TEST_CASE("bur jammer: fractional eps*T spills onto one reduced round") {
    AdversaryConfig cfg;
    cfg.kind = JammerKind::bur;
    cfg.window = 10;
    cfg.epsilon = 0.25; // eps*T = 2.5
    cfg.budget = 1.0;   // level 4
    const auto noise = drive(cfg, 1, 1, 20);
    CHECK(noise[0][0] == 4.0);
    CHECK(noise[1][0] == 4.0);
    CHECK(noise[2][0] == doctest::Approx(2.0).epsilon(1e-12));
    for (std::uint64_t t = 3; t < 10; ++t)
        CHECK(noise[t][0] == 0.0);
    CHECK(window_spend(noise, 10, 0, 0) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(window_spend(noise, 10, 1, 0) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("constant jammer") {
    AdversaryConfig cfg;
    cfg.kind = JammerKind::constant;

    SUBCASE("level zero") {
        cfg.level = 0.0;
        for (const auto& row : drive(cfg, 1, 2, 60))
            for (double x : row)
                CHECK(x == 0.0);
    }
    SUBCASE("level 1.1*theta is potentially busy for any epsilon") {
        cfg.level = 1.1;
        for (double eps : {0.05, 1.0 / 3.0, 0.9}) {
            PhysicalConfig phys;
            phys.epsilon = eps;
            CHECK(potentially_busy(1.1, phys));
        }
        const auto noise = drive(cfg, 1, 2, 120);
        CHECK(window_spend(noise, 60, 0, 0) == doctest::Approx(1.1 * 60).epsilon(1e-12));
    }
}

TEST_CASE("ledger flags non-exact strategies and aborts on overspend") {
    BudgetLedger ledger(1.0, 4, 2);
    std::vector<double> ok{0.5, 1.0};
    for (std::uint64_t t = 0; t < 4; ++t)
        ledger.charge(t, ok);
    CHECK(ledger.windows_completed() == 1);
    CHECK(!ledger.all_complete_windows_exact()); // node 0 spent 2 < 4

    BudgetLedger strict(1.0, 4, 1);
    std::vector<double> over{4.5};
    CHECK_THROWS_AS(strict.charge(0, over), SimError);
}

TEST_SUITE_END();
