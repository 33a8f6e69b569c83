#include "sade/topology.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace sade {

namespace {

std::uint64_t position_key(const Position& p) {
    std::uint64_t xb, yb;
    std::memcpy(&xb, &p.x, sizeof xb);
    std::memcpy(&yb, &p.y, sizeof yb);
    return mix64(xb) ^ (yb * 0x9E3779B97F4A7C15ULL);
}

struct PositionEq {
    bool operator()(const Position& a, const Position& b) const {
        return a.x == b.x && a.y == b.y;
    }
};

struct PositionHash {
    std::size_t operator()(const Position& p) const { return position_key(p); }
};

using PositionSet = std::unordered_set<Position, PositionHash, PositionEq>;

} // namespace

Topology::Topology(double width, double height, std::vector<Position> positions)
    : width_(width), height_(height), positions_(std::move(positions)) {
    if (!(width_ > 0.0) || !(height_ > 0.0))
        throw ConfigError("topology: width and height must be > 0");
    if (positions_.empty())
        throw ConfigError("topology: needs at least one node");
    PositionSet seen;
    seen.reserve(positions_.size() * 2);
    for (const Position& p : positions_) {
        if (!(p.x >= 0.0 && p.x < width_ && p.y >= 0.0 && p.y < height_))
            throw ConfigError("topology: position out of bounds");
        if (!seen.insert(p).second)
            throw ConfigError("topology: duplicate node position");
    }
}

GridIndex::GridIndex(const Topology& topo, double cell_size) {
    if (!(cell_size > 0.0))
        throw ConfigError("grid index: cell_size must be > 0");
    nx_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(topo.width() / cell_size));
    ny_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(topo.height() / cell_size));
    cell_w_ = topo.width() / nx_;
    cell_h_ = topo.height() / ny_;
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (NodeId v = 0; v < topo.size(); ++v)
        buckets_[cell_of(topo.pos(v))].push_back(v); // id order per bucket
}

std::uint32_t GridIndex::cell_of(const Position& p) const noexcept {
    auto cx = static_cast<std::uint32_t>(p.x / cell_w_);
    auto cy = static_cast<std::uint32_t>(p.y / cell_h_);
    if (cx >= nx_) cx = nx_ - 1;
    if (cy >= ny_) cy = ny_ - 1;
    return cy * nx_ + cx;
}

void GridIndex::cells_near(const Position& p, double r, std::vector<std::uint32_t>& out) const {
    const std::uint32_t cell = cell_of(p);
    const std::uint32_t cvx = cell % nx_;
    const std::uint32_t cvy = cell / nx_;
    const auto span_x = static_cast<std::uint32_t>(r / cell_w_) + 1;
    const auto span_y = static_cast<std::uint32_t>(r / cell_h_) + 1;

    auto axis_cells = [](std::uint32_t center, std::uint32_t span, std::uint32_t count,
                         std::vector<std::uint32_t>& cells) {
        cells.clear();
        if (2ull * span + 1 >= count) {
            for (std::uint32_t i = 0; i < count; ++i) cells.push_back(i);
        } else {
            for (std::int64_t i = -static_cast<std::int64_t>(span); i <= span; ++i) {
                std::int64_t c = (center + i + count) % count;
                cells.push_back(static_cast<std::uint32_t>(c));
            }
        }
    };

    std::vector<std::uint32_t> xs, ys;
    axis_cells(cvx, span_x, nx_, xs);
    axis_cells(cvy, span_y, ny_, ys);
    for (std::uint32_t cy : ys)
        for (std::uint32_t cx : xs)
            out.push_back(cy * nx_ + cx);
}

std::vector<NodeId> nodes_within(const Topology& topo, const GridIndex& index, NodeId v, double r) {
    if (!(r >= 0.0))
        throw ConfigError("nodes_within: radius must be >= 0");
    const Position& pv = topo.pos(v);
    const double r2 = r * r;
    std::vector<std::uint32_t> cells;
    index.cells_near(pv, r, cells);
    std::vector<NodeId> result;
    for (std::uint32_t cell : cells)
        for (NodeId u : index.bucket(cell))
            if (u != v && torus_dist2(pv, topo.pos(u), topo.width(), topo.height()) <= r2)
                result.push_back(u);
    std::sort(result.begin(), result.end());
    return result;
}

Topology gen_uniform(std::uint32_t n, double width, double height, SubstreamRng& rng) {
    if (n < 1)
        throw ConfigError("gen_uniform: n must be >= 1");
    if (!(width > 0.0) || !(height > 0.0))
        throw ConfigError("gen_uniform: plane dimensions must be > 0");
    std::vector<Position> positions;
    positions.reserve(n);
    PositionSet seen;
    seen.reserve(n * 2);
    while (positions.size() < n) {
        Position p{rng.next_double() * width, rng.next_double() * height};
        if (seen.insert(p).second)
            positions.push_back(p);
    }
    return Topology(width, height, std::move(positions));
}

HetScenario gen_het(std::uint32_t grid_side, double sub_size, std::uint32_t lambda_min,
                    std::uint32_t lambda_max, SubstreamRng& rng) {
    if (grid_side < 1)
        throw ConfigError("gen_het: grid_side must be >= 1");
    if (!(sub_size > 0.0))
        throw ConfigError("gen_het: sub_size must be > 0");
    if (lambda_min > lambda_max)
        throw ConfigError("gen_het: lambda_min must be <= lambda_max");
    const double extent = grid_side * sub_size;
    std::vector<Position> positions;
    std::vector<std::uint32_t> cell_of_node;
    PositionSet seen;
    for (std::uint32_t gy = 0; gy < grid_side; ++gy) {
        for (std::uint32_t gx = 0; gx < grid_side; ++gx) {
            const std::uint32_t cell = gy * grid_side + gx;
            const std::uint64_t span = static_cast<std::uint64_t>(lambda_max) - lambda_min + 1;
            const auto lambda = lambda_min + static_cast<std::uint32_t>(rng.next_below(span));
            for (std::uint32_t k = 0; k < lambda;) {
                Position p{(gx + rng.next_double()) * sub_size, (gy + rng.next_double()) * sub_size};
                // Guard against the sub-square's upper edge landing exactly on
                // the plane boundary after rounding.
                if (p.x >= extent || p.y >= extent) continue;
                if (!seen.insert(p).second) continue;
                positions.push_back(p);
                cell_of_node.push_back(cell);
                ++k;
            }
        }
    }
    if (positions.empty())
        throw ConfigError("gen_het: generated an empty topology (lambda range all zero)");
    return HetScenario{Topology(extent, extent, std::move(positions)), std::move(cell_of_node),
                       grid_side, sub_size};
}

ZoneRadii zone_radii(const PhysicalConfig& phys) {
    phys.validate(); // alpha <= 2 rejected here: the R1 formula diverges
    ZoneRadii z;
    z.r1 = std::pow(phys.power / (phys.beta * phys.theta), 1.0 / phys.alpha);
    const double c = std::max(2.0, std::ceil(std::pow(1.0 / phys.epsilon, 1.0 / (phys.alpha - 2.0))));
    z.r2 = c * z.r1;
    return z;
}

void save_topology(const Topology& topo, std::ostream& out) {
    out.precision(17);
    out << topo.width() << ' ' << topo.height() << ' ' << topo.size() << '\n';
    for (const Position& p : topo.positions())
        out << p.x << ' ' << p.y << '\n';
}

Topology load_topology(std::istream& in) {
    double width = 0.0, height = 0.0;
    std::uint64_t n = 0;
    if (!(in >> width >> height >> n))
        throw ConfigError("topology file: malformed header (want: width height n)");
    std::vector<Position> positions;
    positions.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Position p;
        if (!(in >> p.x >> p.y))
            throw ConfigError("topology file: truncated at node " + std::to_string(i));
        positions.push_back(p);
    }
    return Topology(width, height, std::move(positions));
}

void save_topology_file(const Topology& topo, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot open for writing: " + path);
    save_topology(topo, out);
}

Topology load_topology_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open: " + path);
    return load_topology(in);
}

} // namespace sade
