#pragma once

// Index construction.
//
// All three passes share one shape: gather candidate (object, distance) pairs
// from already-finished lists of neighbouring vertices, keep the best distance
// per object, and retain the k smallest under (distance, object).
//
//   partial   increasing rank   {v} ∩ M  ∪  V_k^<(w), w ∈ BNS^<(v)
//   bottom-up any order         V_k^<(w), w ∈ G'^>(v), shifted by dist(v, w) in G'^>(v)
//   bidirect. decreasing rank   V_k^<(v)  ∪  V_k(w), w ∈ BNS^>(v)

#include <algorithm>
#include <queue>
#include <vector>

#include "knnidx/bn_graph.hpp"
#include "knnidx/checksum.hpp"
#include "knnidx/knn_table.hpp"
#include "knnidx/object_set.hpp"

namespace knnidx {

/// Everything reported about one construction run.
struct BuildStats {
    BnGraphStats graph;
    std::uint64_t eta = 0;  // max |V(G'^>(v))|; 0 when not computed
    std::uint64_t sssp_invocations = 0;
    std::uint64_t max_candidate_set = 0;          // final-index pass
    std::uint64_t max_partial_candidate_set = 0;  // V_k^< pass

    friend bool operator==(const BuildStats&, const BuildStats&) = default;
};

enum class BuildAlgorithm { bottom_up, bidirectional };

/// Per-object best distance, reset in O(1) by bumping an epoch.
class CandidateSet {
public:
    explicit CandidateSet(std::size_t num_vertices)
        : stamp_(num_vertices, 0), banned_(num_vertices, 0), best_(num_vertices, kInfinity) {}

    void reset() {
        touched_.clear();
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            std::fill(banned_.begin(), banned_.end(), 0);
            epoch_ = 1;
        }
    }

    void offer(Vertex object, Distance d) {
        if (banned_[object] == epoch_) return;
        if (stamp_[object] != epoch_) {
            stamp_[object] = epoch_;
            best_[object] = d;
            touched_.push_back(object);
        } else if (d < best_[object]) {
            best_[object] = d;
        }
    }

    /// Excludes `object` for the rest of this epoch; later offers are ignored.
    void exclude(Vertex object) { banned_[object] = epoch_; }

    std::size_t size() const noexcept { return touched_.size(); }

    /// The k smallest candidates under (distance, object), sorted.
    void select(std::size_t k, std::vector<KnnEntry>& out) const {
        out.clear();
        for (Vertex o : touched_)
            if (banned_[o] != epoch_) out.push_back({o, best_[o]});
        if (out.size() > k) {
            std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end(), entry_less);
            out.resize(k);
        }
        std::sort(out.begin(), out.end(), entry_less);
    }

private:
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> banned_;
    std::vector<Distance> best_;
    std::vector<Vertex> touched_;
    std::uint32_t epoch_ = 0;
};

inline std::uint64_t objects_fingerprint(const ObjectSet& objects, std::size_t k) {
    Fnv1a h;
    h.update_value(static_cast<std::uint64_t>(k));
    h.update_value(static_cast<std::uint64_t>(objects.num_vertices()));
    for (Vertex v : objects.sorted()) h.update_value(v);
    return h.digest();
}

namespace detail {
inline void check_build_args(const BnGraph& bn, const ObjectSet& objects, std::size_t k) {
    if (k == 0) throw UsageError("k must be at least 1");
    if (objects.size() == 0) throw UsageError("object set must not be empty");
    if (objects.num_vertices() != bn.num_vertices()) throw UsageError("object set does not match graph size");
}
}  // namespace detail

/// Recomputes V_k^<(v) from the lists of BNS^<(v). Returns the candidate count.
inline std::size_t compute_partial_list(const BnGraph& bn, const ObjectSet& objects, const PartialKnn& partial,
                                        Vertex v, CandidateSet& cand, std::vector<KnnEntry>& out) {
    cand.reset();
    if (objects.contains(v)) cand.offer(v, 0);
    for (const auto& a : bn.lower(v))
        for (const auto& e : partial.list(a.to)) cand.offer(e.object, a.weight + e.distance);
    cand.select(partial.k(), out);
    return cand.size();
}

/// Recomputes V_k(v) from V_k^<(v) and the lists of BNS^>(v). Returns the candidate count.
inline std::size_t compute_index_list(const BnGraph& bn, const PartialKnn& partial, const KnnIndex& index, Vertex v,
                                      CandidateSet& cand, std::vector<KnnEntry>& out) {
    cand.reset();
    for (const auto& e : partial.list(v)) cand.offer(e.object, e.distance);
    for (const auto& a : bn.higher(v))
        for (const auto& e : index.list(a.to)) cand.offer(e.object, a.weight + e.distance);
    cand.select(index.k(), out);
    return cand.size();
}

inline PartialKnn compute_partial_knn(const BnGraph& bn, const ObjectSet& objects, std::size_t k,
                                      BuildStats* stats = nullptr) {
    detail::check_build_args(bn, objects, k);
    PartialKnn partial{KnnTable(bn.num_vertices(), k)};
    CandidateSet cand(bn.num_vertices());
    std::vector<KnnEntry> out;
    std::size_t widest = 0;
    for (Vertex r = 0; r < bn.num_vertices(); ++r) {
        const Vertex v = bn.order().at_rank(r);
        widest = std::max(widest, compute_partial_list(bn, objects, partial, v, cand, out));
        partial.table.assign(v, out);
    }
    if (stats) stats->max_partial_candidate_set = std::max<std::uint64_t>(stats->max_partial_candidate_set, widest);
    return partial;
}

/// G'^>(u): vertices reachable from u along strictly rank-increasing edges,
/// with the induced edges in local numbering. vertices[0] is u.
struct IncreasingSubgraph {
    std::vector<Vertex> vertices;
    std::vector<std::size_t> offsets;
    std::vector<std::pair<std::uint32_t, Distance>> arcs;  // (local index, weight)

    Vertex root() const { return vertices.front(); }
    std::size_t size() const noexcept { return vertices.size(); }

    /// Induced edges as global (u, v, weight) with u < v, sorted.
    std::vector<std::tuple<Vertex, Vertex, Distance>> edges() const {
        std::vector<std::tuple<Vertex, Vertex, Distance>> out;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            for (std::size_t j = offsets[i]; j < offsets[i + 1]; ++j)
                if (vertices[i] < vertices[arcs[j].first])
                    out.emplace_back(vertices[i], vertices[arcs[j].first], arcs[j].second);
        std::sort(out.begin(), out.end());
        return out;
    }
};

/// Reusable scratch for repeated subgraph extraction.
class SubgraphWorkspace {
public:
    explicit SubgraphWorkspace(std::size_t num_vertices) : stamp_(num_vertices, 0), local_(num_vertices, 0) {}

    void build(const BnGraph& bn, Vertex u, IncreasingSubgraph& sub) {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
        sub.vertices.clear();
        sub.offsets.clear();
        sub.arcs.clear();
        visit(u, sub);
        for (std::size_t head = 0; head < sub.vertices.size(); ++head)
            for (const auto& a : bn.higher(sub.vertices[head]))
                if (stamp_[a.to] != epoch_) visit(a.to, sub);
        // Every induced edge is a BNS^> arc of its lower endpoint, which is in
        // the subgraph whenever the upper one is.
        const std::size_t size = sub.vertices.size();
        sub.offsets.assign(size + 2, 0);
        for (std::size_t i = 0; i < size; ++i) {
            const auto up = bn.higher(sub.vertices[i]);
            sub.offsets[i + 2] += up.size();
            for (const auto& a : up) ++sub.offsets[local_[a.to] + 2];
        }
        for (std::size_t i = 2; i < size + 2; ++i) sub.offsets[i] += sub.offsets[i - 1];
        sub.arcs.resize(sub.offsets[size + 1]);
        for (std::size_t i = 0; i < size; ++i) {
            for (const auto& a : bn.higher(sub.vertices[i])) {
                const std::uint32_t j = local_[a.to];
                sub.arcs[sub.offsets[i + 1]++] = {j, a.weight};
                sub.arcs[sub.offsets[j + 1]++] = {static_cast<std::uint32_t>(i), a.weight};
            }
        }
        sub.offsets.pop_back();
    }

private:
    void visit(Vertex v, IncreasingSubgraph& sub) {
        stamp_[v] = epoch_;
        local_[v] = static_cast<std::uint32_t>(sub.vertices.size());
        sub.vertices.push_back(v);
    }

    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> local_;
    std::uint32_t epoch_ = 0;
};

inline IncreasingSubgraph build_increasing_subgraph(const BnGraph& bn, Vertex u) {
    if (u >= bn.num_vertices()) throw UsageError("unknown vertex " + std::to_string(u + 1));
    SubgraphWorkspace ws(bn.num_vertices());
    IncreasingSubgraph sub;
    ws.build(bn, u, sub);
    return sub;
}

/// Binary-heap Dijkstra from the root within the subgraph; result is indexed
/// like sub.vertices.
inline void sssp_on_subgraph(const IncreasingSubgraph& sub, std::vector<Distance>& dist, BuildStats* stats = nullptr) {
    using Item = std::pair<Distance, std::uint32_t>;
    dist.assign(sub.size(), kInfinity);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[0] = 0;
    heap.emplace(0, 0);
    while (!heap.empty()) {
        const auto [d, x] = heap.top();
        heap.pop();
        if (d != dist[x]) continue;
        for (std::size_t j = sub.offsets[x]; j < sub.offsets[x + 1]; ++j) {
            const auto [y, w] = sub.arcs[j];
            if (d + w < dist[y]) {
                dist[y] = d + w;
                heap.emplace(dist[y], y);
            }
        }
    }
    if (stats) ++stats->sssp_invocations;
}

inline std::vector<Distance> sssp_on_subgraph(const IncreasingSubgraph& sub, BuildStats* stats = nullptr) {
    std::vector<Distance> dist;
    sssp_on_subgraph(sub, dist, stats);
    return dist;
}

/// Bottom-up construction: one subgraph search per vertex.
inline KnnIndex build_index_bottom_up(const BnGraph& bn, const PartialKnn& partial, const ObjectSet& objects,
                                      BuildStats* stats = nullptr) {
    const std::size_t k = partial.k();
    detail::check_build_args(bn, objects, k);
    const std::size_t n = bn.num_vertices();
    KnnIndex index{KnnTable(n, k)};
    CandidateSet cand(n);
    SubgraphWorkspace ws(n);
    IncreasingSubgraph sub;
    std::vector<Distance> dist;
    std::vector<KnnEntry> out;
    std::size_t widest = 0, eta = 0;
    for (Vertex r = 0; r < n; ++r) {
        const Vertex u = bn.order().at_rank(r);
        ws.build(bn, u, sub);
        sssp_on_subgraph(sub, dist, stats);
        eta = std::max(eta, sub.size());
        cand.reset();
        for (std::size_t i = 0; i < sub.size(); ++i)
            for (const auto& e : partial.list(sub.vertices[i])) cand.offer(e.object, dist[i] + e.distance);
        widest = std::max(widest, cand.size());
        cand.select(k, out);
        index.table.assign(u, out);
    }
    if (stats) {
        stats->eta = eta;
        stats->max_candidate_set = std::max<std::uint64_t>(stats->max_candidate_set, widest);
    }
    return index;
}

/// Bidirectional construction: decreasing rank, no shortest-path searches.
inline KnnIndex build_index_bidirectional(const BnGraph& bn, const PartialKnn& partial, const ObjectSet& objects,
                                          BuildStats* stats = nullptr) {
    const std::size_t k = partial.k();
    detail::check_build_args(bn, objects, k);
    const std::size_t n = bn.num_vertices();
    KnnIndex index{KnnTable(n, k)};
    CandidateSet cand(n);
    std::vector<KnnEntry> out;
    std::size_t widest = 0;
    for (Vertex r = static_cast<Vertex>(n); r-- > 0;) {
        const Vertex u = bn.order().at_rank(r);
        widest = std::max(widest, compute_index_list(bn, partial, index, u, cand, out));
        index.table.assign(u, out);
    }
    if (stats) stats->max_candidate_set = std::max<std::uint64_t>(stats->max_candidate_set, widest);
    return index;
}

/// max over v of |V(G'^>(v))|. One search per vertex; not free on large graphs.
inline std::size_t compute_eta(const BnGraph& bn) {
    SubgraphWorkspace ws(bn.num_vertices());
    IncreasingSubgraph sub;
    std::size_t eta = 0;
    for (Vertex v = 0; v < bn.num_vertices(); ++v) {
        ws.build(bn, v, sub);
        eta = std::max(eta, sub.size());
    }
    return eta;
}

/// Everything a full build produces.
struct BuiltIndex {
    BnGraph bn;
    PartialKnn partial;
    KnnIndex index;
    BuildStats stats;
};

inline BuiltIndex build_knn_index(const RoadNetwork& g, const ObjectSet& objects, std::size_t k,
                                  BuildAlgorithm algorithm = BuildAlgorithm::bidirectional) {
    if (objects.num_vertices() != g.num_vertices()) throw UsageError("object set does not match graph size");
    BuiltIndex out;
    out.bn = build_bn_graph(g).second;
    out.stats.graph = out.bn.stats();
    out.partial = compute_partial_knn(out.bn, objects, k, &out.stats);
    out.index = algorithm == BuildAlgorithm::bottom_up
                    ? build_index_bottom_up(out.bn, out.partial, objects, &out.stats)
                    : build_index_bidirectional(out.bn, out.partial, objects, &out.stats);
    return out;
}

}  // namespace knnidx
