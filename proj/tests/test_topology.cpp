#include "sade/topology.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sade;

namespace {

// O(n) oracle for nodes_within, with its own wrap arithmetic.
std::vector<NodeId> brute_within(const Topology& topo, NodeId v, double r) {
    std::vector<NodeId> out;
    for (NodeId u = 0; u < topo.size(); ++u) {
        if (u == v)
            continue;
        const double dx = std::remainder(topo.pos(u).x - topo.pos(v).x, topo.width());
        const double dy = std::remainder(topo.pos(u).y - topo.pos(v).y, topo.height());
        if (std::hypot(dx, dy) <= r)
            out.push_back(u);
    }
    return out;
}

} // namespace

TEST_SUITE_BEGIN("topology");

TEST_CASE("torus distance on the 25x25 plane") {
    const Topology topo(25.0, 25.0, {{0.0, 0.0}, {24.0, 0.0}, {12.5, 0.0}, {1.0, 1.0}, {24.0, 24.0}});
    CHECK(torus_distance(topo.pos(0), topo.pos(1), topo) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(torus_distance(topo.pos(0), topo.pos(2), topo) == doctest::Approx(12.5).epsilon(1e-15));
    // (1,1)-(24,24) wraps to deltas (2,2): sqrt(8)
    CHECK(torus_distance(topo.pos(3), topo.pos(4), topo) ==
          doctest::Approx(2.8284271247461903).epsilon(1e-15));
}

TEST_CASE("torus distance is a metric on random triples") {
    SubstreamRng rng(11, 0, StreamPurpose::placement);
    const Topology topo = gen_uniform(60, 13.0, 7.0, rng);
    for (int trial = 0; trial < 300; ++trial) {
        const auto a = static_cast<NodeId>(rng.next_below(topo.size()));
        const auto b = static_cast<NodeId>(rng.next_below(topo.size()));
        const auto c = static_cast<NodeId>(rng.next_below(topo.size()));
        const double dab = torus_distance(topo.pos(a), topo.pos(b), topo);
        const double dba = torus_distance(topo.pos(b), topo.pos(a), topo);
        const double dac = torus_distance(topo.pos(a), topo.pos(c), topo);
        const double dcb = torus_distance(topo.pos(c), topo.pos(b), topo);
        CHECK(dab >= 0.0);
        CHECK(dab == dba);
        CHECK((a == b) == (dab == 0.0));
        CHECK(dab <= dac + dcb + 1e-12);
    }
}

TEST_CASE("gen_uniform basics") {
    SubstreamRng rng(7, 0, StreamPurpose::placement);
    const Topology one = gen_uniform(1, 25.0, 25.0, rng);
    CHECK(one.size() == 1);
    CHECK(one.pos(0).x >= 0.0);
    CHECK(one.pos(0).x < 25.0);
    CHECK(one.pos(0).y >= 0.0);
    CHECK(one.pos(0).y < 25.0);

    SubstreamRng r1(42, 0, StreamPurpose::placement);
    SubstreamRng r2(42, 0, StreamPurpose::placement);
    const Topology a = gen_uniform(500, 25.0, 25.0, r1);
    const Topology b = gen_uniform(500, 25.0, 25.0, r2);
    REQUIRE(a.size() == b.size());
    for (NodeId v = 0; v < a.size(); ++v) {
        CHECK(a.pos(v).x == b.pos(v).x);
        CHECK(a.pos(v).y == b.pos(v).y);
    }
}

TEST_CASE("gen_uniform law of large numbers") {
    SubstreamRng rng(123, 0, StreamPurpose::placement);
    const Topology topo = gen_uniform(10000, 25.0, 25.0, rng);
    double mean_x = 0.0;
    for (const Position& p : topo.positions())
        mean_x += p.x;
    mean_x /= topo.size();
    CHECK(mean_x == doctest::Approx(12.5).epsilon(0.04)); // +-0.5
}

TEST_CASE("gen_het sub-square structure") {
    SubstreamRng rng(5, 0, StreamPurpose::placement);
    const HetScenario het = gen_het(5, 5.0, 20, 1000, rng);
    CHECK(het.topo.width() == 25.0);
    CHECK(het.topo.height() == 25.0);

    std::vector<std::uint32_t> counts(25, 0);
    for (std::size_t i = 0; i < het.cell_of_node.size(); ++i) {
        const std::uint32_t cell = het.cell_of_node[i];
        REQUIRE(cell < 25);
        counts[cell] += 1;
        // membership: the position lies inside the assigned sub-square
        const Position& p = het.topo.pos(static_cast<NodeId>(i));
        const std::uint32_t gx = cell % 5, gy = cell / 5;
        CHECK(p.x >= gx * 5.0);
        CHECK(p.x < (gx + 1) * 5.0);
        CHECK(p.y >= gy * 5.0);
        CHECK(p.y < (gy + 1) * 5.0);
    }
    for (std::uint32_t c : counts) {
        CHECK(c >= 20);
        CHECK(c <= 1000);
    }
}

TEST_CASE("gen_het degenerate single cell") {
    SubstreamRng rng(5, 0, StreamPurpose::placement);
    const HetScenario het = gen_het(1, 25.0, 7, 7, rng);
    CHECK(het.topo.size() == 7);
    for (const Position& p : het.topo.positions()) {
        CHECK(p.x < 25.0);
        CHECK(p.y < 25.0);
    }
}

TEST_CASE("nodes_within matches brute force") {
    SubstreamRng rng(99, 0, StreamPurpose::placement);
    const Topology topo = gen_uniform(200, 25.0, 25.0, rng);
    const GridIndex index(topo, 1.5874);
    for (double r : {0.0, 0.7, 1.6, 4.0, 12.5, 20.0}) {
        for (NodeId v = 0; v < 20; ++v) {
            const auto got = nodes_within(topo, index, v, r);
            const auto want = brute_within(topo, v, r);
            CHECK(got == want);
        }
    }
}

TEST_CASE("nodes_within edge cases") {
    const Topology topo(10.0, 10.0, {{1.0, 1.0}, {2.0, 1.0}});
    const GridIndex index(topo, 1.0);
    CHECK(nodes_within(topo, index, 0, 0.0).empty());
    // boundary inclusive: the other node sits at distance exactly 1
    CHECK(nodes_within(topo, index, 0, 1.0) == std::vector<NodeId>{1});
}

TEST_CASE("grid index buckets partition the nodes") {
    SubstreamRng rng(3, 0, StreamPurpose::placement);
    const Topology topo = gen_uniform(300, 25.0, 25.0, rng);
    const GridIndex index(topo, 2.0);
    std::vector<int> seen(topo.size(), 0);
    for (std::uint32_t c = 0; c < index.cells_x() * index.cells_y(); ++c)
        for (NodeId v : index.bucket(c)) {
            CHECK(index.cell_of(topo.pos(v)) == c);
            seen[v] += 1;
        }
    CHECK(std::all_of(seen.begin(), seen.end(), [](int k) { return k == 1; }));
}

TEST_CASE("zone radii") {
    PhysicalConfig phys; // P=8, beta=2, theta=1, alpha=3, eps=1/3
    const ZoneRadii z = zone_radii(phys);
    CHECK(z.r1 == doctest::Approx(1.5874010519681994).epsilon(1e-15)); // 4^(1/3)
    CHECK(z.r2 == doctest::Approx(3.0 * z.r1).epsilon(1e-15));         // c = max(2, 3^1) = 3

    PhysicalConfig unit = phys;
    unit.power = phys.beta * phys.theta;
    CHECK(zone_radii(unit).r1 == doctest::Approx(1.0).epsilon(1e-15));

    PhysicalConfig bad = phys;
    bad.alpha = 2.0;
    CHECK_THROWS_AS(zone_radii(bad), ConfigError);
}

TEST_CASE("zone radii monotonicity") {
    PhysicalConfig base;
    const double r1 = zone_radii(base).r1;
    for (double scale : {1.5, 2.0, 4.0}) {
        PhysicalConfig b = base;
        b.beta = base.beta * scale;
        CHECK(zone_radii(b).r1 < r1);
        PhysicalConfig t = base;
        t.theta = base.theta * scale;
        CHECK(zone_radii(t).r1 < r1);
        PhysicalConfig p = base;
        p.power = base.power * scale;
        CHECK(zone_radii(p).r1 > r1);
    }
}

TEST_CASE("topology text round-trip is exact") {
    SubstreamRng rng(17, 0, StreamPurpose::placement);
    const Topology topo = gen_uniform(50, 25.0, 25.0, rng);
    std::stringstream ss;
    save_topology(topo, ss);
    const Topology back = load_topology(ss);
    REQUIRE(back.size() == topo.size());
    CHECK(back.width() == topo.width());
    CHECK(back.height() == topo.height());
    for (NodeId v = 0; v < topo.size(); ++v) {
        CHECK(back.pos(v).x == topo.pos(v).x);
        CHECK(back.pos(v).y == topo.pos(v).y);
    }
}

TEST_CASE("topology validation") {
    CHECK_THROWS_AS(Topology(25.0, 25.0, {}), ConfigError);
    CHECK_THROWS_AS(Topology(25.0, 25.0, {{1.0, 1.0}, {1.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(Topology(25.0, 25.0, {{25.0, 1.0}}), ConfigError);
    CHECK_THROWS_AS(Topology(0.0, 25.0, {{0.0, 0.0}}), ConfigError);
}

TEST_SUITE_END();
