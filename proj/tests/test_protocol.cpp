#include "sade/protocol.hpp"

#include <doctest.h>

#include <cmath>

using namespace sade;

TEST_SUITE_BEGIN("protocol");

TEST_CASE("sade init") {
    SadeParams params;
    params.gamma = 0.1;
    params.p_hat = 1.0 / 24.0;
    const SadeState s = sade_init(params);
    CHECK(s.p == 1.0 / 24.0);
    CHECK(s.T_est == 1);
    CHECK(s.c == 1);
    CHECK(!s.idle_in_window);
    CHECK(sade_init(params) == s);
}

TEST_CASE("sade update rules") {
    SadeParams params;
    params.gamma = 0.1;
    params.p_hat = 1.0 / 24.0;

    SUBCASE("idle at the cap keeps the cap") {
        SadeState s = sade_init(params);
        s.T_est = 5;
        const SadeState next = sade_update(s, Observation::idle(), params);
        CHECK(next.p == params.p_hat);
        CHECK(next.T_est == 4); // decrement, floor at 1
        CHECK(next.idle_in_window);
    }
    SUBCASE("received divides by 1+gamma") {
        SadeState s = sade_init(params);
        s.p = 0.01;
        s.T_est = 10;
        const SadeState next = sade_update(s, Observation::received(3), params);
        CHECK(next.p == 0.01 / 1.1);
        CHECK(next.p == doctest::Approx(0.0090909090909).epsilon(1e-10));
    }
    SUBCASE("busy round wraps the initial window and applies the penalty") {
        const SadeState s = sade_init(params); // T=1, c=1
        const SadeState next = sade_update(s, Observation::busy(), params);
        CHECK(next.c == 1);
        CHECK(next.T_est == 3);
        CHECK(next.p == params.p_hat / 1.1);
        CHECK(!next.idle_in_window);
    }
    SUBCASE("idle seen in the wrapping round suppresses the penalty") {
        const SadeState s = sade_init(params); // T=1, c=1
        const SadeState next = sade_update(s, Observation::idle(), params);
        CHECK(next.c == 1);
        CHECK(next.T_est == 1);
        CHECK(next.p == params.p_hat);
        CHECK(!next.idle_in_window); // reset for the new window
    }
    SUBCASE("T_est floor") {
        SadeState s = sade_init(params);
        s.T_est = 1;
        const SadeState next = sade_update(s, Observation::idle(), params);
        CHECK(next.T_est == 1);
    }
}

TEST_CASE("sade decide frequency and determinism") {
    SadeParams params;
    SadeState s = sade_init(params); // p = 1/24
    SubstreamRng rng(1234, 5, StreamPurpose::decision);
    const int n = 1000000;
    int transmits = 0;
    for (int i = 0; i < n; ++i)
        transmits += sade_decide(s, rng) == Action::transmit;
    const double p = 1.0 / 24.0;
    const double sigma = std::sqrt(p * (1 - p) * n);
    CHECK(std::fabs(transmits - p * n) <= 3.0 * sigma);

    SubstreamRng a(99, 1, StreamPurpose::decision), b(99, 1, StreamPurpose::decision);
    for (int i = 0; i < 1000; ++i)
        CHECK(sade_decide(s, a) == sade_decide(s, b));
}

TEST_CASE("sade invariants under random observation sequences") {
    SadeParams params;
    params.gamma = 0.11;
    params.p_hat = 1.0 / 24.0;
    SubstreamRng rng(17, 0, StreamPurpose::decision);
    for (int trial = 0; trial < 40; ++trial) {
        SadeState s = sade_init(params);
        for (int t = 0; t < 4000; ++t) {
            Observation obs;
            switch (rng.next_below(4)) {
            case 0: obs = Observation::received(0); break;
            case 1: obs = Observation::idle(); break;
            case 2: obs = Observation::busy(); break;
            default: obs = Observation::sent(); break;
            }
            const SadeState before = s;
            s = sade_update(s, obs, params);

            CHECK(s.p > 0.0);
            CHECK(s.p <= params.p_hat);
            CHECK(s.T_est >= 1);
            CHECK(s.c >= 1);
            CHECK(s.c <= s.T_est + 1);

            // idle never decreases p unless... it never does: the idle flag
            // suppresses the wrap penalty in the same round
            if (obs.kind == ObsKind::idle)
                CHECK(s.p >= before.p);
            if (obs.kind == ObsKind::received)
                CHECK(s.p <= before.p);

            // window accounting: +2 on wrap-without-idle, -1 on idle
            if (obs.kind == ObsKind::idle)
                CHECK((s.T_est == std::max<std::uint64_t>(1, before.T_est - 1)));
            else
                CHECK((s.T_est == before.T_est || s.T_est == before.T_est + 2));
        }
    }
}

TEST_CASE("perpetual idle converges to the cap and window 1") {
    SadeParams params;
    params.gamma = 0.05;
    SadeState s = sade_init(params);
    s.p = 1e-9;
    s.T_est = 5000;
    s.c = 17;
    int rounds = 0;
    while ((s.p != params.p_hat || s.T_est != 1) && rounds < 1000000) {
        s = sade_update(s, Observation::idle(), params);
        ++rounds;
    }
    CHECK(s.p == params.p_hat);
    CHECK(s.T_est == 1);
}

TEST_CASE("backoff baseline") {
    BackoffParams params; // cw_min=2, cw_max=1024
    SubstreamRng rng(3, 0, StreamPurpose::backoff);

    SUBCASE("success resets the window") {
        BackoffState s{512, 0};
        s = backoff_update(s, Observation::sent(), true, params, rng);
        CHECK(s.cw == params.cw_min);
        CHECK(s.timer < s.cw);
    }
    SUBCASE("k failures double up to the cap") {
        BackoffState s{params.cw_min, 0};
        for (int k = 1; k <= 12; ++k) {
            s = backoff_update(s, Observation::sent(), false, params, rng);
            const std::uint32_t want = std::min<std::uint32_t>(params.cw_min << k, params.cw_max);
            CHECK(s.cw == want);
            CHECK(s.timer < s.cw);
        }
    }
    SUBCASE("timer only decreases on idle") {
        BackoffState s{8, 5};
        s = backoff_update(s, Observation::busy(), false, params, rng);
        CHECK(s.timer == 5);
        s = backoff_update(s, Observation::received(1), false, params, rng);
        CHECK(s.timer == 5);
        s = backoff_update(s, Observation::idle(), false, params, rng);
        CHECK(s.timer == 4);
    }
    SUBCASE("decide transmits exactly at timer zero") {
        CHECK(backoff_decide(BackoffState{4, 0}) == Action::transmit);
        CHECK(backoff_decide(BackoffState{4, 1}) == Action::listen);
    }
}

TEST_CASE("default gamma") {
    // T=60, n=500: 1/(log2 60 + log2 log2 500)
    const double want = 1.0 / (std::log2(60.0) + std::log2(std::log2(500.0)));
    CHECK(default_gamma(60, 500) == doctest::Approx(want).epsilon(1e-15));
    CHECK(default_gamma(60, 500) == doctest::Approx(0.11024).epsilon(1e-4));
    // clamped on both ends
    CHECK(default_gamma(1, 1) == 0.5);
    CHECK(default_gamma(std::uint64_t(1) << 60, std::uint64_t(1) << 32) >= 0.01);
}

TEST_SUITE_END();
