#pragma once

// Object insertion and deletion on a built index.
//
// Both operations run a Dijkstra-ordered frontier from the updated vertex u
// over BN-Graph edges. A vertex is admitted to the affected set S when its
// list changes; only admitted vertices are expanded. Admission compares
// (distance, object) pairs, so every list stays the lexicographic top-k and
// the affected set is closed under shortest-path prefixes.
//
// V_k^< is refreshed first by an upward pass (increasing rank) from u, so a
// later deletion can rely on it for the decreasing-rank candidates.

#include <algorithm>
#include <functional>
#include <queue>
#include <vector>

#include "knnidx/knn_builder.hpp"

namespace knnidx {

enum class UpdateKind { insert, erase };

struct UpdateReport {
    UpdateKind operation = UpdateKind::insert;
    Vertex object = kNoVertex;
    std::size_t affected_count = 0;      // |S|, the vertices whose V_k list changed
    std::size_t frontier_visits = 0;     // BNS arcs scanned from admitted vertices
    std::size_t candidate_work = 0;      // entries scanned while picking replacements
    std::size_t partial_recomputed = 0;  // V_k^< lists recomputed
    std::size_t partial_changed = 0;
    std::vector<Vertex> admitted;  // S in admission order
    std::vector<Vertex> changed;   // vertices whose V_k list changed, in change order
};

/// Applies updates in place to an index and its object set. Holds references;
/// the caller guarantees exclusive access for the lifetime of each call.
class IndexMaintainer {
public:
    IndexMaintainer(const BnGraph& bn, PartialKnn& partial, KnnIndex& index, ObjectSet& objects)
        : bn_(bn), partial_(partial), index_(index), objects_(objects), cand_(bn.num_vertices()),
          dist_(bn.num_vertices(), kInfinity), seen_(bn.num_vertices(), 0), done_(bn.num_vertices(), 0) {
        if (index.num_vertices() != bn.num_vertices() || partial.table.num_vertices() != bn.num_vertices() ||
            objects.num_vertices() != bn.num_vertices() || partial.k() != index.k())
            throw UsageError("index, partial lists, objects and graph disagree in size");
    }

    UpdateReport insert(Vertex u) {
        check_vertex(u);
        if (objects_.contains(u)) throw UsageError("vertex " + std::to_string(u + 1) + " is already an object");
        UpdateReport report;
        report.operation = UpdateKind::insert;
        report.object = u;
        objects_.insert(u);
        refresh_partial(u, report);

        frontier(u, report, [&](Vertex v, Distance d) {
            return !index_.table.full(v) || entry_less({u, d}, index_.list(v).back());
        });
        for (Vertex v : report.admitted) {
            index_.table.insert_sorted(v, {u, dist_[v]});
            report.changed.push_back(v);
        }
        return report;
    }

    UpdateReport erase(Vertex u) {
        check_vertex(u);
        if (!objects_.contains(u)) throw UsageError("vertex " + std::to_string(u + 1) + " is not an object");
        if (objects_.size() == 1) throw UsageError("cannot delete the last object");
        UpdateReport report;
        report.operation = UpdateKind::erase;
        report.object = u;
        objects_.erase(u);
        refresh_partial(u, report);

        frontier(u, report, [&](Vertex v, Distance) { return index_.table.contains(v, u); });
        holders_ = report.admitted;
        std::sort(holders_.begin(), holders_.end(),
                  [&](Vertex a, Vertex b) { return bn_.rank(a) > bn_.rank(b); });

        for (Vertex v : holders_) {
            cand_.reset();
            cand_.exclude(u);
            for (const auto& e : index_.list(v)) cand_.exclude(e.object);
            for (const auto& e : partial_.list(v)) cand_.offer(e.object, e.distance);
            report.candidate_work += partial_.list(v).size();
            for (const auto& a : bn_.higher(v)) {
                const auto list = index_.list(a.to);
                for (const auto& e : list) cand_.offer(e.object, a.weight + e.distance);
                report.candidate_work += list.size();
            }
            cand_.select(1, best_);
            index_.table.erase(v, u);
            if (!best_.empty()) index_.table.insert_sorted(v, best_.front());
            report.changed.push_back(v);
        }
        return report;
    }

private:
    void check_vertex(Vertex u) const {
        if (u >= bn_.num_vertices()) throw UsageError("unknown vertex " + std::to_string(u + 1));
    }

    void next_epoch() {
        if (++epoch_ == 0) {
            std::fill(seen_.begin(), seen_.end(), 0);
            std::fill(done_.begin(), done_.end(), 0);
            epoch_ = 1;
        }
    }

    /// Recomputes V_k^< upward from u until lists stop changing.
    void refresh_partial(Vertex u, UpdateReport& report) {
        next_epoch();
        using Item = std::pair<Vertex, Vertex>;  // (rank, vertex)
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(bn_.rank(u), u);
        seen_[u] = epoch_;
        while (!heap.empty()) {
            const Vertex v = heap.top().second;
            heap.pop();
            compute_partial_list(bn_, objects_, partial_, v, cand_, best_);
            ++report.partial_recomputed;
            if (std::ranges::equal(best_, partial_.list(v))) continue;
            partial_.table.assign(v, best_);
            ++report.partial_changed;
            for (const auto& a : bn_.higher(v)) {
                if (seen_[a.to] == epoch_) continue;
                seen_[a.to] = epoch_;
                heap.emplace(bn_.rank(a.to), a.to);
            }
        }
    }

    /// Dijkstra from u over BN-Graph edges; `admit(v, d)` gates expansion.
    /// Admitted vertices are recorded with their exact distance in dist_.
    template <typename Admit>
    void frontier(Vertex u, UpdateReport& report, Admit&& admit) {
        next_epoch();
        using Item = std::pair<Distance, Vertex>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        auto relax = [&](Vertex v, Distance d) {
            if (seen_[v] != epoch_) {
                seen_[v] = epoch_;
                dist_[v] = d;
            } else if (d >= dist_[v]) {
                return;
            }
            dist_[v] = d;
            heap.emplace(d, v);
        };
        relax(u, 0);
        while (!heap.empty()) {
            const auto [d, v] = heap.top();
            heap.pop();
            if (d != dist_[v] || is_settled(v)) continue;
            mark_settled(v);
            if (!admit(v, d)) continue;
            report.admitted.push_back(v);
            for (const auto& a : bn_.neighbors(v)) {
                ++report.frontier_visits;
                if (!is_settled(a.to)) relax(a.to, d + a.weight);
            }
        }
        report.affected_count = report.admitted.size();
    }

    bool is_settled(Vertex v) const { return done_[v] == epoch_; }
    void mark_settled(Vertex v) { done_[v] = epoch_; }

private:
    const BnGraph& bn_;
    PartialKnn& partial_;
    KnnIndex& index_;
    ObjectSet& objects_;
    CandidateSet cand_;
    std::vector<Distance> dist_;
    std::vector<std::uint32_t> seen_;
    std::vector<std::uint32_t> done_;
    std::uint32_t epoch_ = 0;
    std::vector<Vertex> holders_;
    std::vector<KnnEntry> best_;
};

/// One-shot insertion; builds fresh scratch on each call.
inline UpdateReport insert_object(const BnGraph& bn, PartialKnn& partial, KnnIndex& index, ObjectSet& objects,
                                  Vertex u) {
    return IndexMaintainer(bn, partial, index, objects).insert(u);
}

/// One-shot deletion; builds fresh scratch on each call.
inline UpdateReport delete_object(const BnGraph& bn, PartialKnn& partial, KnnIndex& index, ObjectSet& objects,
                                  Vertex u) {
    return IndexMaintainer(bn, partial, index, objects).erase(u);
}

}  // namespace knnidx
