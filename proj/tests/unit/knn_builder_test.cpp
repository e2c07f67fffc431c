#include <gtest/gtest.h>

#include <queue>

#include "support.hpp"

using namespace knnidx;
using namespace knnidx::testing;

namespace {

struct Built {
    BnGraph bn;
    PartialKnn partial;
};

Built prepare(const RoadNetwork& g, const ObjectSet& m, std::size_t k) {
    Built b{build_bn_graph(g).second, {}};
    b.partial = compute_partial_knn(b.bn, m, k);
    return b;
}

/// Top-k over objects reachable from u by strictly rank-decreasing paths,
/// measured along such paths only.
std::vector<KnnEntry> decreasing_rank_knn(const BnGraph& bn, const ObjectSet& m, std::size_t k, Vertex u) {
    std::vector<Distance> dist(bn.num_vertices(), kInfinity);
    using Item = std::pair<Distance, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[u] = 0;
    heap.emplace(0, u);
    while (!heap.empty()) {
        auto [d, x] = heap.top();
        heap.pop();
        if (d != dist[x]) continue;
        for (const auto& a : bn.neighbors(x))
            if (bn.rank(a.to) < bn.rank(x) && d + a.weight < dist[a.to]) {
                dist[a.to] = d + a.weight;
                heap.emplace(dist[a.to], a.to);
            }
    }
    std::vector<KnnEntry> out;
    for (Vertex o : m.members())
        if (dist[o] != kInfinity) out.push_back({o, dist[o]});
    std::sort(out.begin(), out.end(), entry_less);
    if (out.size() > k) out.resize(k);
    return out;
}

}  // namespace

TEST(PartialKnn, PathExample) {
    auto b = prepare(path3(), objects_of(3, {0, 2}), 2);
    EXPECT_EQ(to_vector(b.partial.list(0)), entries({{0, 0}}));
    EXPECT_EQ(to_vector(b.partial.list(1)), entries({{0, 1}}));
    EXPECT_EQ(to_vector(b.partial.list(2)), entries({{2, 0}, {0, 2}}));
}

TEST(PartialKnn, MatchesDecreasingRankSearch) {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        auto inst = random_instance(seed, 70);
        auto b = prepare(inst.graph, inst.objects, inst.k);
        for (Vertex u = 0; u < b.bn.num_vertices(); ++u)
            ASSERT_EQ(to_vector(b.partial.list(u)), decreasing_rank_knn(b.bn, inst.objects, inst.k, u))
                << "seed " << seed << " vertex " << u;
    }
}

TEST(PartialKnn, EntriesComeFromLowerNeighbours) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = random_instance(seed, 70);
        auto b = prepare(inst.graph, inst.objects, inst.k);
        const auto d = floyd_warshall(inst.graph);
        for (Vertex u = 0; u < b.bn.num_vertices(); ++u) {
            for (const auto& e : b.partial.list(u)) {
                bool found = e.object == u && e.distance == 0;
                for (const auto& a : b.bn.lower(u))
                    for (const auto& x : b.partial.list(a.to))
                        if (x.object == e.object) found = true;
                ASSERT_TRUE(found);
                ASSERT_GE(e.distance, d[u][e.object]);  // exact whenever a decreasing shortest path exists
            }
        }
    }
}

TEST(IncreasingSubgraph, TopRankIsSingleton) {
    auto b = prepare(path3(), objects_of(3, {0}), 1);
    const Vertex top = b.bn.order().at_rank(2);
    auto sub = build_increasing_subgraph(b.bn, top);
    EXPECT_EQ(sub.vertices, (std::vector<Vertex>{top}));
    EXPECT_TRUE(sub.edges().empty());
    EXPECT_EQ(sssp_on_subgraph(sub), (std::vector<Distance>{0}));
}

TEST(IncreasingSubgraph, PathFromBottom) {
    auto b = prepare(path3(), objects_of(3, {0}), 1);
    auto sub = build_increasing_subgraph(b.bn, 0);
    EXPECT_EQ(sub.vertices, (std::vector<Vertex>{0, 1, 2}));
    EXPECT_EQ(sub.edges(), (std::vector<std::tuple<Vertex, Vertex, Distance>>{{0, 1, 1}, {1, 2, 1}}));
    EXPECT_EQ(sssp_on_subgraph(sub), (std::vector<Distance>{0, 1, 2}));
}

TEST(IncreasingSubgraph, TriangleFromMiddle) {
    auto b = prepare(heavy_triangle(), objects_of(3, {0}), 1);
    auto sub = build_increasing_subgraph(b.bn, 1);
    auto v = sub.vertices;
    std::sort(v.begin(), v.end());
    EXPECT_EQ(v, (std::vector<Vertex>{1, 2}));
}

TEST(IncreasingSubgraph, SsspMatchesDijkstraOnInducedGraph) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = random_instance(seed, 60);
        auto b = prepare(inst.graph, inst.objects, inst.k);
        for (Vertex u = 0; u < b.bn.num_vertices(); ++u) {
            auto sub = build_increasing_subgraph(b.bn, u);
            for (std::size_t i = 1; i < sub.size(); ++i)
                ASSERT_GT(b.bn.rank(sub.vertices[i]), b.bn.rank(u));
            // rebuild the induced graph independently and compare
            std::vector<EdgeTriple> edges;
            std::vector<Vertex> local(b.bn.num_vertices(), kNoVertex);
            for (std::size_t i = 0; i < sub.size(); ++i) local[sub.vertices[i]] = static_cast<Vertex>(i);
            for (auto [x, y, w] : sub.edges()) edges.push_back({local[x], local[y], static_cast<Weight>(w)});
            auto induced = RoadNetwork::from_edges(sub.size(), edges);
            BuildStats stats;
            EXPECT_EQ(sssp_on_subgraph(sub, &stats), dijkstra_sssp(induced, 0));
            EXPECT_EQ(stats.sssp_invocations, 1u);
            // subgraph distances are true distances
            const auto truth = dijkstra_sssp(inst.graph, u);
            const auto local_dist = sssp_on_subgraph(sub);
            for (std::size_t i = 0; i < sub.size(); ++i) ASSERT_EQ(local_dist[i], truth[sub.vertices[i]]);
        }
    }
}

TEST(BuildIndex, PathExampleBothBuilders) {
    auto m = objects_of(3, {0, 2});
    auto b = prepare(path3(), m, 2);
    for (auto index : {build_index_bottom_up(b.bn, b.partial, m), build_index_bidirectional(b.bn, b.partial, m)}) {
        EXPECT_EQ(to_vector(index.list(2)), entries({{2, 0}, {0, 2}}));
        EXPECT_EQ(to_vector(index.list(1)), entries({{0, 1}, {2, 1}}));
        EXPECT_EQ(to_vector(index.list(0)), entries({{0, 0}, {2, 2}}));
    }
}

TEST(BuildIndex, SingleObjectGivesItsDistanceEverywhere) {
    auto g = generate_random_connected(40, 50, {1, 100}, 3);
    auto m = objects_of(40, {17});
    auto built = build_knn_index(g, m, 3);
    const auto d = dijkstra_sssp(g, 17);
    for (Vertex v = 0; v < 40; ++v) EXPECT_EQ(to_vector(built.index.list(v)), entries({{17, d[v]}}));
}

TEST(BuildIndex, EveryVertexAnObjectWithKOne) {
    auto g = generate_random_connected(40, 50, {1, 100}, 4);
    auto built = build_knn_index(g, sample_objects(g, 1.0, 0), 1);
    for (Vertex v = 0; v < 40; ++v) EXPECT_EQ(to_vector(built.index.list(v)), entries({{v, 0}}));
}

TEST(BuildIndex, EqualsAllPairsOracleExactly) {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        auto inst = random_instance(seed, 70);
        const auto d = floyd_warshall(inst.graph);
        for (auto algo : {BuildAlgorithm::bottom_up, BuildAlgorithm::bidirectional}) {
            auto built = build_knn_index(inst.graph, inst.objects, inst.k, algo);
            for (Vertex u = 0; u < inst.graph.num_vertices(); ++u)
                ASSERT_EQ(to_vector(built.index.list(u)), matrix_knn(d, inst.objects, inst.k, u))
                    << "seed " << seed << " vertex " << u;
        }
    }
}

TEST(BuildIndex, BuildersAreBitIdenticalAndCountSearches) {
    for (std::uint64_t seed = 100; seed < 140; ++seed) {
        auto inst = random_instance(seed, 150);
        auto up = build_knn_index(inst.graph, inst.objects, inst.k, BuildAlgorithm::bottom_up);
        auto bi = build_knn_index(inst.graph, inst.objects, inst.k, BuildAlgorithm::bidirectional);
        EXPECT_EQ(up.index, bi.index);
        EXPECT_EQ(up.stats.sssp_invocations, inst.graph.num_vertices());
        EXPECT_EQ(bi.stats.sssp_invocations, 0u);
        EXPECT_EQ(up.stats.eta, compute_eta(up.bn));
    }
}

TEST(BuildIndex, CandidateSetWithinBound) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        auto inst = random_instance(seed, 150);
        auto bi = build_knn_index(inst.graph, inst.objects, inst.k, BuildAlgorithm::bidirectional);
        EXPECT_LE(bi.stats.max_candidate_set, (bi.bn.stats().tau + 1) * inst.k);
    }
}

TEST(BuildIndex, ListLengthsAreMinOfKAndObjects) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = random_instance(seed, 60);
        auto built = build_knn_index(inst.graph, inst.objects, inst.k);
        const auto len = std::min(inst.k, inst.objects.size());
        for (Vertex v = 0; v < inst.graph.num_vertices(); ++v) EXPECT_EQ(built.index.list(v).size(), len);
        EXPECT_EQ(built.index.total_entries(), len * inst.graph.num_vertices());
    }
}

TEST(BuildIndex, RejectsBadArguments) {
    auto g = path3();
    auto bn = build_bn_graph(g).second;
    EXPECT_THROW(compute_partial_knn(bn, objects_of(3, {0}), 0), UsageError);
    EXPECT_THROW(compute_partial_knn(bn, objects_of(4, {0}), 1), UsageError);
    EXPECT_THROW(build_knn_index(g, objects_of(5, {0}), 1), UsageError);
}

TEST(CandidateSet, KeepsBestAndHonoursExclusions) {
    CandidateSet c(10);
    c.reset();
    c.offer(3, 7);
    c.offer(3, 4);
    c.offer(5, 4);
    c.exclude(6);
    c.offer(6, 1);
    c.offer(2, 9);
    std::vector<KnnEntry> out;
    c.select(2, out);
    EXPECT_EQ(out, entries({{3, 4}, {5, 4}}));
    c.reset();
    c.offer(6, 1);
    c.select(5, out);
    EXPECT_EQ(out, entries({{6, 1}}));
}
