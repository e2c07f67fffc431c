#pragma once

// Brute-force ground truth. Nothing here reads the BN-Graph or the index
// builders' intermediate state, so it can judge them independently.

#include <algorithm>
#include <queue>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "knnidx/bn_graph.hpp"
#include "knnidx/generators.hpp"
#include "knnidx/knn_table.hpp"
#include "knnidx/object_set.hpp"

namespace knnidx {

namespace detail {

/// Label-setting search that settles vertices in (distance, id) order and
/// hands each settled vertex to `visit`; stops when visit returns false.
template <typename Neighbors, typename Visit>
void settle_in_order(std::size_t n, Vertex source, Neighbors&& neighbors, Visit&& visit) {
    using Item = std::pair<Distance, Vertex>;
    std::vector<Distance> dist(n, kInfinity);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0;
    heap.emplace(0, source);
    while (!heap.empty()) {
        const auto [d, x] = heap.top();
        heap.pop();
        if (d != dist[x]) continue;
        if (!visit(x, d)) return;
        for (const auto& a : neighbors(x)) {
            const Distance nd = d + a.weight;
            if (nd < dist[a.to]) {
                dist[a.to] = nd;
                heap.emplace(nd, a.to);
            }
        }
    }
}

inline void check_vertex(std::size_t n, Vertex v) {
    if (v >= n) throw UsageError("unknown vertex " + std::to_string(v + 1));
}

}  // namespace detail

inline std::vector<Distance> dijkstra_sssp(const RoadNetwork& g, Vertex source) {
    detail::check_vertex(g.num_vertices(), source);
    std::vector<Distance> dist(g.num_vertices(), kInfinity);
    detail::settle_in_order(g.num_vertices(), source, [&](Vertex x) { return g.neighbors(x); },
                            [&](Vertex x, Distance d) {
                                dist[x] = d;
                                return true;
                            });
    return dist;
}

/// Shortest distances inside G' (used to check distance preservation).
inline std::vector<Distance> dijkstra_sssp(const BnGraph& bn, Vertex source) {
    detail::check_vertex(bn.num_vertices(), source);
    std::vector<Distance> dist(bn.num_vertices(), kInfinity);
    detail::settle_in_order(bn.num_vertices(), source, [&](Vertex x) { return bn.neighbors(x); },
                            [&](Vertex x, Distance d) {
                                dist[x] = d;
                                return true;
                            });
    return dist;
}

/// The k nearest objects of u under (distance, object), found by expanding
/// from u until the k-th object settles.
inline std::vector<KnnEntry> dijkstra_knn(const RoadNetwork& g, const ObjectSet& objects, std::size_t k, Vertex u) {
    detail::check_vertex(g.num_vertices(), u);
    std::vector<KnnEntry> out;
    if (k == 0) return out;
    detail::settle_in_order(g.num_vertices(), u, [&](Vertex x) { return g.neighbors(x); },
                            [&](Vertex x, Distance d) {
                                if (objects.contains(x)) out.push_back({x, d});
                                return out.size() < k;
                            });
    return out;
}

/// Objects within the k-th nearest distance of u (ties included), with their
/// exact distances. Any valid kNN answer is a subset of this.
inline std::unordered_map<Vertex, Distance> knn_ball(const RoadNetwork& g, const ObjectSet& objects, std::size_t k,
                                                     Vertex u) {
    std::unordered_map<Vertex, Distance> ball;
    std::size_t found = 0;
    Distance radius = kInfinity;
    detail::settle_in_order(g.num_vertices(), u, [&](Vertex x) { return g.neighbors(x); },
                            [&](Vertex x, Distance d) {
                                if (d > radius) return false;
                                if (objects.contains(x)) {
                                    ball.emplace(x, d);
                                    if (++found == k) radius = d;
                                }
                                return true;
                            });
    return ball;
}

struct Violation {
    std::string kind;
    Vertex vertex = kNoVertex;
    std::string detail;
};

struct VerificationReport {
    std::size_t checked = 0;
    std::size_t violation_count = 0;
    std::vector<Violation> first;  // at most kMaxListed

    static constexpr std::size_t kMaxListed = 10;

    bool ok() const noexcept { return violation_count == 0; }

    void add(std::string kind, Vertex v, std::string detail) {
        ++violation_count;
        if (first.size() < kMaxListed) first.push_back({std::move(kind), v, std::move(detail)});
    }

    void merge(const VerificationReport& other) {
        checked += other.checked;
        violation_count += other.violation_count;
        for (const auto& x : other.first)
            if (first.size() < kMaxListed) first.push_back(x);
    }

    std::string summary() const {
        std::ostringstream out;
        out << checked << " checked, " << violation_count << " violation(s)";
        for (const auto& x : first) {
            out << "\n  [" << x.kind << "]";
            if (x.vertex != kNoVertex) out << " vertex " << x.vertex + 1;
            out << ": " << x.detail;
        }
        return out.str();
    }
};

namespace detail {
inline std::string describe(std::span<const KnnEntry> list) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < list.size(); ++i)
        out << (i ? " " : "") << '(' << list[i].object + 1 << ',' << list[i].distance << ')';
    out << ']';
    return out.str();
}
}  // namespace detail

/// Checks a single stored list against the oracle: shape, sortedness, equal
/// distance multiset, and that every listed object is a legitimate member.
inline void verify_list(const RoadNetwork& g, const ObjectSet& objects, std::size_t k, Vertex v,
                        std::span<const KnnEntry> stored, VerificationReport& report) {
    ++report.checked;
    const auto truth = dijkstra_knn(g, objects, k, v);
    if (stored.size() != truth.size()) {
        report.add("shape", v,
                   "length " + std::to_string(stored.size()) + ", expected " + std::to_string(truth.size()));
        return;
    }
    for (std::size_t i = 1; i < stored.size(); ++i) {
        if (!entry_less(stored[i - 1], stored[i])) {
            report.add("order", v, "not strictly sorted: " + detail::describe(stored));
            return;
        }
    }
    for (std::size_t i = 0; i < stored.size(); ++i) {
        if (stored[i].distance != truth[i].distance) {
            report.add("distance", v, "stored " + detail::describe(stored) + ", oracle " + detail::describe(truth));
            return;
        }
    }
    const auto ball = knn_ball(g, objects, k, v);
    for (const auto& e : stored) {
        auto it = ball.find(e.object);
        if (it == ball.end() || it->second != e.distance) {
            report.add("membership", v,
                       "object " + std::to_string(e.object + 1) + " at " + std::to_string(e.distance) +
                           " is not a valid member; oracle " + detail::describe(truth));
            return;
        }
    }
}

inline VerificationReport verify_index(const RoadNetwork& g, const ObjectSet& objects, std::size_t k,
                                       const KnnIndex& index) {
    VerificationReport report;
    if (index.num_vertices() != g.num_vertices()) {
        report.add("shape", kNoVertex,
                   "index covers " + std::to_string(index.num_vertices()) + " vertices, graph has " +
                       std::to_string(g.num_vertices()));
        return report;
    }
    if (index.k() != k) {
        report.add("shape", kNoVertex,
                   "index built for k=" + std::to_string(index.k()) + ", expected k=" + std::to_string(k));
        return report;
    }
    for (Vertex v = 0; v < g.num_vertices(); ++v) verify_list(g, objects, k, v, index.list(v), report);
    return report;
}

struct BnVerifyOptions {
    std::size_t exhaustive_edge_limit = 2000;  // check every edge when n is at most this
    std::size_t exhaustive_pair_limit = 200;   // check all pairs when n is at most this
    std::size_t sample_sources = 20;
    std::size_t sample_targets = 50;  // pairs = sources * targets
    std::uint64_t seed = 0;
};

/// Checks the three defining conditions of a BN-Graph: same vertex set, every
/// edge weight equals the true distance, and pairwise distances are preserved.
inline VerificationReport verify_bn_graph(const RoadNetwork& g, const BnGraph& bn, BnVerifyOptions opt = {}) {
    VerificationReport report;
    const std::size_t n = g.num_vertices();
    ++report.checked;
    if (bn.num_vertices() != n) {
        report.add("vertex-set", kNoVertex,
                   "G' has " + std::to_string(bn.num_vertices()) + " vertices, G has " + std::to_string(n));
        return report;
    }
    Rng rng(opt.seed);

    // edge weights
    std::vector<Vertex> sources;
    if (n <= opt.exhaustive_edge_limit) {
        for (Vertex v = 0; v < n; ++v) sources.push_back(v);
    } else {
        for (std::size_t i = 0; i < opt.exhaustive_edge_limit; ++i) sources.push_back(static_cast<Vertex>(rng.below(n)));
    }
    for (Vertex u : sources) {
        if (bn.neighbors(u).empty()) continue;
        const auto dist = dijkstra_sssp(g, u);
        for (const auto& a : bn.neighbors(u)) {
            ++report.checked;
            if (a.weight != dist[a.to])
                report.add("edge-weight", u,
                           "edge to " + std::to_string(a.to + 1) + " weighs " + std::to_string(a.weight) +
                               ", distance is " + std::to_string(dist[a.to]));
        }
    }

    // pairwise distances
    auto compare_from = [&](Vertex s, std::span<const Vertex> targets) {
        const auto dg = dijkstra_sssp(g, s);
        const auto db = dijkstra_sssp(bn, s);
        for (Vertex t : targets) {
            ++report.checked;
            if (dg[t] != db[t])
                report.add("distance", s,
                           "to " + std::to_string(t + 1) + ": G' gives " + std::to_string(db[t]) + ", G gives " +
                               std::to_string(dg[t]));
        }
    };
    if (n <= opt.exhaustive_pair_limit) {
        std::vector<Vertex> all(n);
        for (Vertex v = 0; v < n; ++v) all[v] = v;
        for (Vertex s = 0; s < n; ++s) compare_from(s, all);
    } else {
        std::vector<Vertex> targets(opt.sample_targets);
        for (std::size_t i = 0; i < opt.sample_sources; ++i) {
            const auto s = static_cast<Vertex>(rng.below(n));
            for (auto& t : targets) t = static_cast<Vertex>(rng.below(n));
            compare_from(s, targets);
        }
    }
    return report;
}

}  // namespace knnidx
