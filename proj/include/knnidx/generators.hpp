#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "knnidx/road_network.hpp"

namespace knnidx {

/// Inclusive integer interval for generated edge weights.
struct WeightRange {
    Weight min = 1;
    Weight max = 1;
};

/// Seeded generator whose outputs do not depend on the standard library's
/// distribution implementations (those are unspecified), only on mt19937_64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do x = engine_();
        while (x >= limit);
        return x % bound;
    }

    /// Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) {
        if (hi - lo == std::numeric_limits<std::uint64_t>::max()) return engine_();
        return lo + below(hi - lo + 1);
    }

    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 engine_;
};

namespace detail {
inline void check_range(const WeightRange& r) {
    if (r.min < 1) throw UsageError("weight range must start at 1 or above");
    if (r.min > r.max) throw UsageError("inverted weight range");
}
}  // namespace detail

/// rows x cols lattice with 4-neighbourhood edges. Vertex (r, c) has id r*cols + c.
inline RoadNetwork generate_grid(std::size_t rows, std::size_t cols, WeightRange range, std::uint64_t seed) {
    if (rows == 0 || cols == 0) throw UsageError("grid must have at least one row and one column");
    detail::check_range(range);
    Rng rng(seed);
    std::vector<EdgeTriple> edges;
    edges.reserve(2 * rows * cols);
    auto id = [cols](std::size_t r, std::size_t c) { return static_cast<Vertex>(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) edges.push_back({id(r, c), id(r, c + 1), static_cast<Weight>(rng.between(range.min, range.max))});
            if (r + 1 < rows) edges.push_back({id(r, c), id(r + 1, c), static_cast<Weight>(rng.between(range.min, range.max))});
        }
    }
    return RoadNetwork::from_edges(rows * cols, edges);
}

/// Random spanning tree plus `extra_edges` distinct non-tree edges.
inline RoadNetwork generate_random_connected(std::size_t n, std::size_t extra_edges, WeightRange range,
                                             std::uint64_t seed) {
    if (n == 0) throw UsageError("graph must have at least one vertex");
    detail::check_range(range);
    const std::uint64_t max_extra = static_cast<std::uint64_t>(n) * (n - 1) / 2 - (n - 1);
    if (extra_edges > max_extra)
        throw UsageError("too many extra edges: at most " + std::to_string(max_extra) + " fit on " +
                         std::to_string(n) + " vertices");

    Rng rng(seed);
    std::vector<Vertex> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<Vertex>(i);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    auto key = [](Vertex a, Vertex b) {
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | b;
    };
    std::unordered_set<std::uint64_t> used;
    std::vector<EdgeTriple> edges;
    edges.reserve(n - 1 + extra_edges);
    for (std::size_t i = 1; i < n; ++i) {
        const Vertex parent = perm[rng.below(i)];
        edges.push_back({perm[i], parent, static_cast<Weight>(rng.between(range.min, range.max))});
        used.insert(key(perm[i], parent));
    }
    while (edges.size() < n - 1 + extra_edges) {
        const auto a = static_cast<Vertex>(rng.below(n));
        const auto b = static_cast<Vertex>(rng.below(n));
        if (a == b || !used.insert(key(a, b)).second) continue;
        edges.push_back({a, b, static_cast<Weight>(rng.between(range.min, range.max))});
    }
    return RoadNetwork::from_edges(n, edges);
}

/// Centered sub-lattice covering `cells` x `cells` out of a 10 x 10 partition of a
/// rows x cols grid generated with `seed`. Used for size-scaling sweeps; the edge
/// weights are those of the full grid.
inline RoadNetwork grid_cells(std::size_t rows, std::size_t cols, std::size_t cells, WeightRange range,
                              std::uint64_t seed) {
    if (cells == 0 || cells > 10) throw UsageError("cell count must be in [1, 10]");
    const RoadNetwork full = generate_grid(rows, cols, range, seed);
    const std::size_t sub_r = std::max<std::size_t>(1, rows * cells / 10);
    const std::size_t sub_c = std::max<std::size_t>(1, cols * cells / 10);
    const std::size_t r0 = (rows - sub_r) / 2;
    const std::size_t c0 = (cols - sub_c) / 2;
    auto inside = [&](Vertex v) {
        const std::size_t r = v / cols, c = v % cols;
        return r >= r0 && r < r0 + sub_r && c >= c0 && c < c0 + sub_c;
    };
    auto local = [&](Vertex v) { return static_cast<Vertex>((v / cols - r0) * sub_c + (v % cols - c0)); };
    std::vector<EdgeTriple> edges;
    for (const auto& e : full.edges())
        if (inside(e.u) && inside(e.v)) edges.push_back({local(e.u), local(e.v), e.weight});
    return RoadNetwork::from_edges(sub_r * sub_c, edges);
}

}  // namespace knnidx
