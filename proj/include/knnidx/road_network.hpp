#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "knnidx/types.hpp"

namespace knnidx {

struct Arc {
    Vertex to;
    Weight weight;

    friend bool operator==(const Arc&, const Arc&) = default;
};

struct EdgeTriple {
    Vertex u;
    Vertex v;
    Weight weight;

    friend bool operator==(const EdgeTriple&, const EdgeTriple&) = default;
};

/// Undirected, connected, positively weighted graph in CSR form.
///
/// Every undirected edge is stored twice (once per endpoint). Adjacency of each
/// vertex is sorted by neighbor id, so two networks with the same edge set
/// compare equal.
class RoadNetwork {
public:
    RoadNetwork() = default;

    /// Builds from an arbitrary edge list. Self-loops are dropped, parallel
    /// edges collapse to the minimum weight, and the result must be connected.
    static RoadNetwork from_edges(std::size_t n, std::span<const EdgeTriple> edges) {
        if (n == 0) throw GraphError("graph has no vertices");
        if (n >= (std::size_t{1} << 31)) throw GraphError("too many vertices");

        std::vector<EdgeTriple> canon;
        canon.reserve(edges.size());
        for (const auto& e : edges) {
            if (e.u >= n || e.v >= n)
                throw GraphError("edge endpoint out of range: " + std::to_string(std::max(e.u, e.v) + 1));
            if (e.weight == 0) throw GraphError("edge weight must be positive");
            if (e.u == e.v) continue;
            canon.push_back(e.u < e.v ? e : EdgeTriple{e.v, e.u, e.weight});
        }
        std::sort(canon.begin(), canon.end(), [](const EdgeTriple& a, const EdgeTriple& b) {
            return std::tie(a.u, a.v, a.weight) < std::tie(b.u, b.v, b.weight);
        });
        // first of each (u,v) run carries the minimum weight
        canon.erase(std::unique(canon.begin(), canon.end(),
                                [](const EdgeTriple& a, const EdgeTriple& b) { return a.u == b.u && a.v == b.v; }),
                    canon.end());

        RoadNetwork g;
        g.offsets_.assign(n + 1, 0);
        for (const auto& e : canon) {
            ++g.offsets_[e.u + 1];
            ++g.offsets_[e.v + 1];
        }
        for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
        g.arcs_.resize(g.offsets_[n]);
        std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& e : canon) {
            g.arcs_[fill[e.u]++] = Arc{e.v, e.weight};
            g.arcs_[fill[e.v]++] = Arc{e.u, e.weight};
        }
        for (std::size_t v = 0; v < n; ++v) {
            std::sort(g.arcs_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                      g.arcs_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]),
                      [](const Arc& a, const Arc& b) { return a.to < b.to; });
        }
        g.check_connected();
        return g;
    }

    std::size_t num_vertices() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_edges() const noexcept { return arcs_.size() / 2; }

    std::span<const Arc> neighbors(Vertex v) const {
        return {arcs_.data() + offsets_[v], offsets_[v + 1] - offsets_[v]};
    }

    std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    /// Each undirected edge once, with u < v, in (u, v) order.
    std::vector<EdgeTriple> edges() const {
        std::vector<EdgeTriple> out;
        out.reserve(num_edges());
        for (Vertex u = 0; u < num_vertices(); ++u)
            for (const auto& a : neighbors(u))
                if (u < a.to) out.push_back({u, a.to, a.weight});
        return out;
    }

    friend bool operator==(const RoadNetwork&, const RoadNetwork&) = default;

private:
    void check_connected() const {
        const std::size_t n = num_vertices();
        std::vector<char> seen(n, 0);
        std::vector<Vertex> stack{0};
        seen[0] = 1;
        std::size_t reached = 1;
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (const auto& a : neighbors(v)) {
                if (!seen[a.to]) {
                    seen[a.to] = 1;
                    ++reached;
                    stack.push_back(a.to);
                }
            }
        }
        if (reached == n) return;
        const auto lost = static_cast<std::size_t>(std::find(seen.begin(), seen.end(), 0) - seen.begin());
        throw GraphError("graph is disconnected: vertex " + std::to_string(lost + 1) +
                         " is unreachable from vertex 1");
    }

    std::vector<std::size_t> offsets_;
    std::vector<Arc> arcs_;
};

}  // namespace knnidx
