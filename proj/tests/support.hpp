#pragma once

// Test-only helpers. The all-pairs oracle below shares no code with the
// library's Dijkstra, so it can cross-check it.

#include <algorithm>
#include <vector>

#include "knnidx/knnidx.hpp"

namespace knnidx::testing {

using Matrix = std::vector<std::vector<Distance>>;

inline Matrix floyd_warshall(const RoadNetwork& g) {
    const std::size_t n = g.num_vertices();
    Matrix d(n, std::vector<Distance>(n, kInfinity));
    for (Vertex v = 0; v < n; ++v) {
        d[v][v] = 0;
        for (const auto& a : g.neighbors(v)) d[v][a.to] = std::min<Distance>(d[v][a.to], a.weight);
    }
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t i = 0; i < n; ++i) {
            if (d[i][m] == kInfinity) continue;
            for (std::size_t j = 0; j < n; ++j)
                if (d[m][j] != kInfinity && d[i][m] + d[m][j] < d[i][j]) d[i][j] = d[i][m] + d[m][j];
        }
    return d;
}

/// Lexicographic (distance, id) top-k of u from an all-pairs table.
inline std::vector<KnnEntry> matrix_knn(const Matrix& d, const ObjectSet& objects, std::size_t k, Vertex u) {
    std::vector<KnnEntry> all;
    for (Vertex o : objects.members()) all.push_back({o, d[u][o]});
    std::sort(all.begin(), all.end(), entry_less);
    if (all.size() > k) all.resize(k);
    return all;
}

inline std::vector<Distance> distances_of(std::span<const KnnEntry> list) {
    std::vector<Distance> out;
    for (const auto& e : list) out.push_back(e.distance);
    return out;
}

inline RoadNetwork make_graph(std::size_t n, std::vector<EdgeTriple> edges) {
    return RoadNetwork::from_edges(n, edges);
}

/// 0 -1- 1 -1- 2
inline RoadNetwork path3() { return make_graph(3, {{0, 1, 1}, {1, 2, 1}}); }

/// (0,1,1) (1,2,1) (0,2,5)
inline RoadNetwork heavy_triangle() { return make_graph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 5}}); }

inline ObjectSet objects_of(std::size_t n, std::vector<Vertex> ids) { return ObjectSet(n, ids); }

inline std::vector<KnnEntry> entries(std::initializer_list<std::pair<Vertex, Distance>> xs) {
    std::vector<KnnEntry> out;
    for (auto [o, d] : xs) out.push_back({o, d});
    return out;
}

inline std::vector<KnnEntry> to_vector(std::span<const KnnEntry> s) { return {s.begin(), s.end()}; }

/// Random connected instance drawn from the same family as the acceptance suite.
struct Instance {
    RoadNetwork graph;
    ObjectSet objects;
    std::size_t k;
};

inline Instance random_instance(std::uint64_t seed, std::size_t max_n = 60) {
    Rng rng(seed);
    const std::size_t n = 1 + rng.below(max_n);
    const std::size_t cap = n * (n - 1) / 2 - (n - 1);
    const std::size_t extra = std::min<std::size_t>(cap, rng.below(2 * n + 1));
    const Weight wmax = rng.below(2) ? 10 : 1000;
    auto g = generate_random_connected(n, extra, {1, wmax}, seed * 7 + 1);
    const double densities[] = {0.05, 0.2, 0.5, 1.0};
    auto m = sample_objects(g, densities[rng.below(4)], seed * 13 + 5);
    const std::size_t ks[] = {1, 2, 3, 5, 8};
    return {std::move(g), std::move(m), ks[rng.below(5)]};
}

}  // namespace knnidx::testing
