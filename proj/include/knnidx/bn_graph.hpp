#pragma once

// Bridge-neighbor-preserved graph construction.
//
// Phase 1 eliminates vertices in rank order (minimum remaining degree first)
// and turns the higher-ranked neighbourhood of every eliminated vertex into a
// clique, inserting or relaxing edges with weight phi(u,w) + phi(w,v).
// Phase 2 walks the ranks downwards; an edge (w,u) to a higher neighbour is
// dropped whenever some other higher neighbour v gives a strictly shorter
// detour phi(w,v) + phi(v,u). Every surviving edge weighs exactly the shortest
// distance between its endpoints, and all pairwise distances are preserved.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "knnidx/road_network.hpp"

namespace knnidx {

/// Bijective rank assignment. Lower rank = eliminated earlier.
class VertexOrder {
public:
    VertexOrder() = default;

    static VertexOrder from_ranks(std::vector<Vertex> rank) {
        VertexOrder o;
        o.by_rank_.assign(rank.size(), kNoVertex);
        for (Vertex v = 0; v < rank.size(); ++v) {
            if (rank[v] >= rank.size() || o.by_rank_[rank[v]] != kNoVertex)
                throw UsageError("rank array is not a permutation");
            o.by_rank_[rank[v]] = v;
        }
        o.rank_ = std::move(rank);
        return o;
    }

    static VertexOrder from_sequence(std::span<const Vertex> by_rank) {
        std::vector<Vertex> rank(by_rank.size(), kNoVertex);
        for (Vertex r = 0; r < by_rank.size(); ++r) {
            if (by_rank[r] >= by_rank.size() || rank[by_rank[r]] != kNoVertex)
                throw UsageError("vertex sequence is not a permutation");
            rank[by_rank[r]] = r;
        }
        return from_ranks(std::move(rank));
    }

    std::size_t size() const noexcept { return rank_.size(); }
    Vertex rank(Vertex v) const { return rank_[v]; }
    Vertex at_rank(Vertex r) const { return by_rank_[r]; }
    std::span<const Vertex> ranks() const noexcept { return rank_; }
    std::span<const Vertex> sequence() const noexcept { return by_rank_; }

    friend bool operator==(const VertexOrder& a, const VertexOrder& b) { return a.rank_ == b.rank_; }

private:
    std::vector<Vertex> rank_;
    std::vector<Vertex> by_rank_;
};

/// Shape statistics of the construction. rho is the maximum degree once the
/// insertion phase has finished; tau and tau_prime are the maxima of
/// |BNS^>(v)| and |BNS(v)| in the final graph.
struct BnGraphStats {
    std::uint64_t rho = 0;
    std::uint64_t tau = 0;
    std::uint64_t tau_prime = 0;
    std::uint64_t edges_inserted = 0;
    std::uint64_t edges_relaxed = 0;
    std::uint64_t edges_removed = 0;

    friend bool operator==(const BnGraphStats&, const BnGraphStats&) = default;
};

struct WeightedArc {
    Vertex to;
    Distance weight;

    friend bool operator==(const WeightedArc&, const WeightedArc&) = default;
};

/// Monotone-priority bucket queue keyed by small integers. Entries are
/// re-bucketed lazily: a key change pushes a fresh entry and stale ones are
/// skipped on pop. Ties go to the smallest vertex id.
class BucketQueue {
public:
    explicit BucketQueue(std::span<const std::size_t> keys) : key_(keys.begin(), keys.end()), done_(keys.size(), 0) {
        for (Vertex v = 0; v < key_.size(); ++v) push(v, key_[v]);
    }

    void update(Vertex v, std::size_t key) {
        key_[v] = key;
        push(v, key);
    }

    /// Removes and returns the live vertex with the smallest (key, id).
    Vertex pop_min() {
        for (;;) {
            while (buckets_[cur_].empty()) ++cur_;
            auto& b = buckets_[cur_];
            std::pop_heap(b.begin(), b.end(), std::greater<>{});
            const Vertex v = b.back();
            b.pop_back();
            if (done_[v] || key_[v] != cur_) continue;
            done_[v] = 1;
            return v;
        }
    }

private:
    void push(Vertex v, std::size_t key) {
        if (key >= buckets_.size()) buckets_.resize(key + 1);
        auto& b = buckets_[key];
        b.push_back(v);
        std::push_heap(b.begin(), b.end(), std::greater<>{});
        cur_ = std::min(cur_, key);
    }

    std::vector<std::size_t> key_;
    std::vector<char> done_;
    std::vector<std::vector<Vertex>> buckets_;
    std::size_t cur_ = 0;
};

/// Graph after the insertion phase: the input plus fill-in edges. Each edge
/// is stored once; incidence lists hold (neighbour, edge id) in insertion order.
class AugmentedGraph {
public:
    using EdgeId = std::uint32_t;

    struct Edge {
        Vertex a;
        Vertex b;
        Distance weight;
        bool removed;
    };

    struct Incidence {
        Vertex to;
        EdgeId edge;
    };

    explicit AugmentedGraph(const RoadNetwork& g) : inc_(g.num_vertices()) {
        for (Vertex v = 0; v < g.num_vertices(); ++v) {
            inc_[v].reserve(g.degree(v));
            for (const auto& a : g.neighbors(v))
                if (v < a.to) add_edge(v, a.to, a.weight);
        }
    }

    std::size_t num_vertices() const noexcept { return inc_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::span<const Incidence> incident(Vertex v) const { return inc_[v]; }
    Edge& edge(EdgeId e) { return edges_[e]; }
    const Edge& edge(EdgeId e) const { return edges_[e]; }

    /// Linear in the degree of u; for tests and diagnostics.
    Distance weight(Vertex u, Vertex v) const {
        for (const auto& i : inc_[u])
            if (i.to == v) return edges_[i.edge].weight;
        return kInfinity;
    }

    EdgeId add_edge(Vertex u, Vertex v, Distance w) {
        const auto id = static_cast<EdgeId>(edges_.size());
        edges_.push_back({u, v, w, false});
        inc_[u].push_back({v, id});
        inc_[v].push_back({u, id});
        return id;
    }

    std::size_t max_degree() const {
        std::size_t d = 0;
        for (const auto& row : inc_) d = std::max(d, row.size());
        return d;
    }

    BnGraphStats stats;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<Incidence>> inc_;
};

/// The pruned graph G' with each adjacency split by rank into BNS^< and BNS^>.
class BnGraph {
public:
    BnGraph() = default;

    /// Assembles a BN-Graph from explicit adjacency lists (both directions
    /// must be present). Used by the builder, the bundle loader, and tests.
    static BnGraph from_adjacency(VertexOrder order, const std::vector<std::vector<WeightedArc>>& adjacency,
                                  BnGraphStats stats = {}) {
        if (order.size() != adjacency.size()) throw UsageError("order and adjacency sizes differ");
        BnGraph g;
        const std::size_t n = adjacency.size();
        g.offsets_.assign(n + 1, 0);
        g.split_.assign(n, 0);
        for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + adjacency[v].size();
        g.arcs_.reserve(g.offsets_[n]);
        stats.tau = stats.tau_prime = 0;
        for (Vertex v = 0; v < n; ++v) {
            const auto start = static_cast<std::ptrdiff_t>(g.arcs_.size());
            for (const auto& a : adjacency[v]) {
                if (a.to >= n || a.to == v) throw UsageError("invalid arc in BN-Graph adjacency");
                g.arcs_.push_back(a);
            }
            auto first = g.arcs_.begin() + start;
            std::sort(first, g.arcs_.end(),
                      [&](const WeightedArc& a, const WeightedArc& b) { return order.rank(a.to) < order.rank(b.to); });
            const auto higher = std::partition_point(
                first, g.arcs_.end(), [&](const WeightedArc& a) { return order.rank(a.to) < order.rank(v); });
            g.split_[v] = static_cast<std::size_t>(higher - g.arcs_.begin());
            stats.tau = std::max<std::uint64_t>(stats.tau, g.offsets_[v + 1] - g.split_[v]);
            stats.tau_prime = std::max<std::uint64_t>(stats.tau_prime, adjacency[v].size());
        }
        g.order_ = std::move(order);
        g.stats_ = stats;
        return g;
    }

    std::size_t num_vertices() const noexcept { return split_.size(); }
    std::size_t num_edges() const noexcept { return arcs_.size() / 2; }
    const VertexOrder& order() const noexcept { return order_; }
    Vertex rank(Vertex v) const { return order_.rank(v); }
    const BnGraphStats& stats() const noexcept { return stats_; }

    /// BNS(v): all neighbours in G', lower ranks first, each half in rank order.
    std::span<const WeightedArc> neighbors(Vertex v) const {
        return {arcs_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }
    /// BNS^<(v)
    std::span<const WeightedArc> lower(Vertex v) const {
        return {arcs_.data() + offsets_[v], split_[v] - offsets_[v]};
    }
    /// BNS^>(v)
    std::span<const WeightedArc> higher(Vertex v) const {
        return {arcs_.data() + split_[v], offsets_[v + 1] - split_[v]};
    }

    Distance weight(Vertex u, Vertex v) const {
        for (const auto& a : neighbors(u))
            if (a.to == v) return a.weight;
        return kInfinity;
    }

    std::vector<std::vector<WeightedArc>> adjacency() const {
        std::vector<std::vector<WeightedArc>> out(num_vertices());
        for (Vertex v = 0; v < num_vertices(); ++v) out[v].assign(neighbors(v).begin(), neighbors(v).end());
        return out;
    }

    friend bool operator==(const BnGraph& a, const BnGraph& b) {
        return a.order_ == b.order_ && a.offsets_ == b.offsets_ && a.split_ == b.split_ && a.arcs_ == b.arcs_;
    }

private:
    VertexOrder order_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> split_;
    std::vector<WeightedArc> arcs_;
    BnGraphStats stats_;
};

namespace detail {

class MinDegreeSelector {
public:
    explicit MinDegreeSelector(std::span<const std::size_t> counts) : queue_(counts) {}
    Vertex next() { return queue_.pop_min(); }
    void update(Vertex v, std::size_t count) { queue_.update(v, count); }

private:
    BucketQueue queue_;
};

class FixedOrderSelector {
public:
    explicit FixedOrderSelector(const VertexOrder& order) : order_(order) {}
    Vertex next() { return order_.at_rank(next_++); }
    void update(Vertex, std::size_t) {}

private:
    const VertexOrder& order_;
    Vertex next_ = 0;
};

template <typename Selector>
std::pair<VertexOrder, AugmentedGraph> eliminate(const RoadNetwork& g, Selector&& select) {
    using Incidence = AugmentedGraph::Incidence;
    const std::size_t n = g.num_vertices();
    AugmentedGraph aug(g);
    std::vector<std::size_t> count(n);  // unprocessed neighbours
    for (Vertex v = 0; v < n; ++v) count[v] = aug.incident(v).size();
    auto selector = select(std::span<const std::size_t>(count));

    // active[v] lists v's unprocessed neighbours; processed ones are dropped lazily.
    std::vector<std::vector<Incidence>> active(n);
    for (Vertex v = 0; v < n; ++v) active[v].assign(aug.incident(v).begin(), aug.incident(v).end());
    std::vector<Vertex> rank(n, kNoVertex);
    std::vector<std::uint32_t> mark(n, 0);
    std::vector<AugmentedGraph::EdgeId> slot(n);
    std::uint32_t stamp = 0;
    auto compact = [&](std::vector<Incidence>& row) {
        std::erase_if(row, [&](const Incidence& i) { return rank[i.to] != kNoVertex; });
    };

    std::vector<Incidence> up;
    for (Vertex r = 0; r < n; ++r) {
        const Vertex w = selector.next();
        rank[w] = r;
        compact(active[w]);
        up.swap(active[w]);
        std::vector<Incidence>().swap(active[w]);
        for (const auto& a : up) selector.update(a.to, --count[a.to]);
        for (std::size_t i = 0; i < up.size(); ++i) {
            const Vertex u = up[i].to;
            const Distance wu = aug.edge(up[i].edge).weight;
            compact(active[u]);
            ++stamp;
            for (const auto& x : active[u]) {
                mark[x.to] = stamp;
                slot[x.to] = x.edge;
            }
            for (std::size_t j = i + 1; j < up.size(); ++j) {
                const Vertex v = up[j].to;
                const Distance through = wu + aug.edge(up[j].edge).weight;
                if (mark[v] != stamp) {
                    const auto e = aug.add_edge(u, v, through);
                    active[u].push_back({v, e});
                    active[v].push_back({u, e});
                    ++aug.stats.edges_inserted;
                    selector.update(u, ++count[u]);
                    selector.update(v, ++count[v]);
                } else if (auto& edge = aug.edge(slot[v]); through < edge.weight) {
                    edge.weight = through;
                    ++aug.stats.edges_relaxed;
                }
            }
        }
        up.clear();
    }
    aug.stats.rho = aug.max_degree();
    return {VertexOrder::from_ranks(std::move(rank)), std::move(aug)};
}

/// Insertion phase under a caller-supplied order (comparison fixtures only).
inline std::pair<VertexOrder, AugmentedGraph> eliminate_in_order(const RoadNetwork& g, const VertexOrder& order) {
    if (order.size() != g.num_vertices()) throw UsageError("order size does not match graph");
    return eliminate(g, [&](std::span<const std::size_t>) { return FixedOrderSelector(order); });
}

}  // namespace detail

/// Insertion phase with the minimum-remaining-degree rank order fused in:
/// the next rank goes to the unprocessed vertex with the fewest unprocessed
/// neighbours in the evolving graph, ties to the smaller id.
inline std::pair<VertexOrder, AugmentedGraph> eliminate_and_augment(const RoadNetwork& g) {
    return detail::eliminate(g, [](std::span<const std::size_t> c) { return detail::MinDegreeSelector(c); });
}

inline VertexOrder compute_order(const RoadNetwork& g) { return eliminate_and_augment(g).first; }

/// Deletion phase. Consumes the augmented graph. Weights of edges between
/// higher vertices are final before any lower vertex is processed, so the
/// detour minimum for each edge does not depend on scan order.
inline BnGraph prune_to_bn_graph(AugmentedGraph aug, const VertexOrder& order) {
    using Incidence = AugmentedGraph::Incidence;
    const std::size_t n = aug.num_vertices();
    if (order.size() != n) throw UsageError("order size does not match graph");
    std::vector<std::vector<Incidence>> upper(n);
    for (Vertex v = 0; v < n; ++v)
        for (const auto& i : aug.incident(v))
            if (order.rank(i.to) > order.rank(v)) upper[v].push_back(i);

    std::vector<std::uint32_t> mark(n, 0), pos(n);
    std::uint32_t stamp = 0;
    std::vector<Distance> direct, best;
    for (Vertex r = static_cast<Vertex>(n); r-- > 0;) {
        const auto& row = upper[order.at_rank(r)];
        ++stamp;
        direct.resize(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            mark[row[i].to] = stamp;
            pos[row[i].to] = static_cast<std::uint32_t>(i);
            direct[i] = aug.edge(row[i].edge).weight;
        }
        best = direct;
        for (std::size_t i = 0; i < row.size(); ++i) {
            for (const auto& x : upper[row[i].to]) {
                if (mark[x.to] != stamp) continue;
                const std::size_t j = pos[x.to];
                const Distance between = aug.edge(x.edge).weight;
                best[j] = std::min(best[j], direct[i] + between);
                best[i] = std::min(best[i], direct[j] + between);
            }
        }
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (best[i] >= direct[i]) continue;
            auto& edge = aug.edge(row[i].edge);
            edge.weight = best[i];
            edge.removed = true;
            ++aug.stats.edges_removed;
        }
    }
    std::vector<std::vector<WeightedArc>> kept(n);
    for (const auto& e : aug.edges()) {
        if (e.removed) continue;
        kept[e.a].push_back({e.b, e.weight});
        kept[e.b].push_back({e.a, e.weight});
    }
    return BnGraph::from_adjacency(order, kept, aug.stats);
}

inline std::pair<VertexOrder, BnGraph> build_bn_graph(const RoadNetwork& g) {
    auto [order, aug] = eliminate_and_augment(g);
    BnGraph bn = prune_to_bn_graph(std::move(aug), order);
    return {std::move(order), std::move(bn)};
}

}  // namespace knnidx
