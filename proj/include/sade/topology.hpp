#pragma once

#include "sade/physical.hpp"
#include "sade/rng.hpp"

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace sade {

using NodeId = std::uint32_t;

struct Position {
    double x = 0.0;
    double y = 0.0;
};

// Immutable node placement on a wrap-around rectangle. Node ids are dense
// integers in construction order.
class Topology {
public:
    Topology(double width, double height, std::vector<Position> positions);

    double width() const noexcept { return width_; }
    double height() const noexcept { return height_; }
    std::uint32_t size() const noexcept { return static_cast<std::uint32_t>(positions_.size()); }
    const Position& pos(NodeId v) const noexcept { return positions_[v]; }
    std::span<const Position> positions() const noexcept { return positions_; }

private:
    double width_;
    double height_;
    std::vector<Position> positions_;
};

// Minimum-image absolute delta along one axis of extent `extent`.
inline double wrap_delta(double a, double b, double extent) noexcept {
    double d = std::fabs(a - b);
    return d <= extent - d ? d : extent - d;
}

inline double torus_dist2(const Position& a, const Position& b, double w, double h) noexcept {
    const double dx = wrap_delta(a.x, b.x, w);
    const double dy = wrap_delta(a.y, b.y, h);
    return dx * dx + dy * dy;
}

inline double torus_distance(const Position& a, const Position& b, const Topology& topo) noexcept {
    return std::sqrt(torus_dist2(a, b, topo.width(), topo.height()));
}

// Uniform spatial hash over the torus. Cells tile the rectangle evenly, so
// the wrap-around neighbourhood of any cell is well defined.
class GridIndex {
public:
    GridIndex(const Topology& topo, double cell_size);

    double cell_width() const noexcept { return cell_w_; }
    double cell_height() const noexcept { return cell_h_; }
    std::uint32_t cells_x() const noexcept { return nx_; }
    std::uint32_t cells_y() const noexcept { return ny_; }

    std::uint32_t cell_of(const Position& p) const noexcept;
    const std::vector<NodeId>& bucket(std::uint32_t cell) const noexcept { return buckets_[cell]; }

    // Appends ids of all cells whose torus neighbourhood intersects the disk
    // of radius r around p. Each cell appears once.
    void cells_near(const Position& p, double r, std::vector<std::uint32_t>& out) const;

private:
    std::uint32_t nx_;
    std::uint32_t ny_;
    double cell_w_;
    double cell_h_;
    std::vector<std::vector<NodeId>> buckets_;
};

// Exactly the nodes u != v with torus_distance(u, v) <= r, ascending id.
std::vector<NodeId> nodes_within(const Topology& topo, const GridIndex& index, NodeId v, double r);

// Uniform i.i.d. placement; exact position collisions are re-drawn.
Topology gen_uniform(std::uint32_t n, double width, double height, SubstreamRng& rng);

// Heterogeneous placement: grid_side x grid_side sub-squares of side
// sub_size, per-square node count drawn uniformly from
// [lambda_min, lambda_max], nodes uniform within their square.
struct HetScenario {
    Topology topo;
    std::vector<std::uint32_t> cell_of_node; // sub-square index, row-major
    std::uint32_t grid_side = 0;
    double sub_size = 0.0;
};

HetScenario gen_het(std::uint32_t grid_side, double sub_size, std::uint32_t lambda_min,
                    std::uint32_t lambda_max, SubstreamRng& rng);

// R1: transmission range, P/R1^alpha = beta*theta.
// R2: critical interference range, c*R1 with
//     c = max(2, ceil((1/epsilon)^(1/(alpha-2)))).
struct ZoneRadii {
    double r1 = 0.0;
    double r2 = 0.0;
};

ZoneRadii zone_radii(const PhysicalConfig& phys);

// Line-oriented text format: header "width height n", then one "x y" line
// per node with enough digits for exact round-trips.
void save_topology(const Topology& topo, std::ostream& out);
Topology load_topology(std::istream& in);
void save_topology_file(const Topology& topo, const std::string& path);
Topology load_topology_file(const std::string& path);

} // namespace sade
