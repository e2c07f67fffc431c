#include <gtest/gtest.h>

#include "support.hpp"

using namespace knnidx;
using namespace knnidx::testing;

TEST(DijkstraSssp, SmallCases) {
    EXPECT_EQ(dijkstra_sssp(make_graph(1, {}), 0), (std::vector<Distance>{0}));
    EXPECT_EQ(dijkstra_sssp(path3(), 0), (std::vector<Distance>{0, 1, 2}));
    EXPECT_THROW(dijkstra_sssp(path3(), 3), UsageError);
}

TEST(DijkstraSssp, AgreesWithFloydWarshall) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto inst = random_instance(seed, 50);
        const auto d = floyd_warshall(inst.graph);
        for (Vertex s = 0; s < inst.graph.num_vertices(); ++s) ASSERT_EQ(dijkstra_sssp(inst.graph, s), d[s]);
    }
}

TEST(DijkstraKnn, SelfIsNearestWhenEveryVertexIsObject) {
    auto g = generate_random_connected(30, 30, {1, 9}, 2);
    auto m = sample_objects(g, 1.0, 0);
    for (Vertex u = 0; u < 30; ++u) EXPECT_EQ(dijkstra_knn(g, m, 1, u), entries({{u, 0}}));
}

TEST(DijkstraKnn, SingletonObject) {
    auto g = generate_random_connected(30, 30, {1, 9}, 2);
    auto m = objects_of(30, {4});
    const auto d = dijkstra_sssp(g, 4);
    for (Vertex u = 0; u < 30; ++u) EXPECT_EQ(dijkstra_knn(g, m, 3, u), entries({{4, d[u]}}));
}

TEST(DijkstraKnn, PathInstance) {
    auto m = objects_of(3, {0, 2});
    EXPECT_EQ(dijkstra_knn(path3(), m, 2, 1), entries({{0, 1}, {2, 1}}));
    EXPECT_EQ(dijkstra_knn(path3(), m, 2, 0), entries({{0, 0}, {2, 2}}));
}

TEST(DijkstraKnn, PrefixProperty) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto inst = random_instance(seed, 50);
        const auto d = floyd_warshall(inst.graph);
        for (Vertex u = 0; u < inst.graph.num_vertices(); ++u) {
            const auto full = dijkstra_knn(inst.graph, inst.objects, inst.k, u);
            ASSERT_EQ(full, matrix_knn(d, inst.objects, inst.k, u));
            for (std::size_t j = 1; j <= inst.k; ++j) {
                auto prefix = dijkstra_knn(inst.graph, inst.objects, j, u);
                ASSERT_TRUE(std::equal(prefix.begin(), prefix.end(), full.begin()));
            }
        }
    }
}

TEST(VerifyIndex, FreshIndexIsClean) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = random_instance(seed, 80);
        auto index = build_knn_index(inst.graph, inst.objects, inst.k).index;
        auto report = verify_index(inst.graph, inst.objects, inst.k, index);
        EXPECT_TRUE(report.ok()) << report.summary();
        EXPECT_EQ(report.checked, inst.graph.num_vertices());
    }
}

TEST(VerifyIndex, CorruptedDistanceFlagsExactlyThatVertex) {
    auto g = generate_grid(8, 8, {1, 9}, 3);
    auto m = sample_objects(g, 0.2, 1);
    auto index = build_knn_index(g, m, 3).index;
    auto list = to_vector(index.list(20));
    list.back().distance += 1;
    index.table.assign(20, list);
    auto report = verify_index(g, m, 3, index);
    EXPECT_EQ(report.violation_count, 1u);
    ASSERT_EQ(report.first.size(), 1u);
    EXPECT_EQ(report.first[0].vertex, 20u);
    EXPECT_EQ(report.first[0].kind, "distance");
    EXPECT_NE(report.summary().find("vertex 21"), std::string::npos);
}

TEST(VerifyIndex, WrongMemberWithRightDistanceIsCaught) {
    // object 1 at distance 1 swapped for a non-object at distance 1
    auto g = path3();
    auto m = objects_of(3, {0});
    auto index = build_knn_index(g, m, 1).index;
    index.table.assign(1, entries({{2, 1}}));
    auto report = verify_index(g, m, 1, index);
    ASSERT_EQ(report.violation_count, 1u);
    EXPECT_EQ(report.first[0].kind, "membership");
}

TEST(VerifyIndex, UnsortedListIsCaught) {
    auto g = path3();
    auto m = objects_of(3, {0, 2});
    auto index = build_knn_index(g, m, 2).index;
    index.table.assign(1, entries({{2, 1}, {0, 1}}));
    auto report = verify_index(g, m, 2, index);
    ASSERT_EQ(report.violation_count, 1u);
    EXPECT_EQ(report.first[0].kind, "order");
}

TEST(VerifyIndex, KMismatchIsShapeViolation) {
    auto g = path3();
    auto m = objects_of(3, {0, 2});
    auto index = build_knn_index(g, m, 2).index;
    auto report = verify_index(g, m, 1, index);
    ASSERT_FALSE(report.ok());
    EXPECT_EQ(report.first[0].kind, "shape");
}

TEST(VerifyIndex, ListsAtMostTenViolations) {
    auto g = generate_grid(10, 10, {1, 9}, 3);
    auto m = sample_objects(g, 0.2, 1);
    auto index = build_knn_index(g, m, 2).index;
    for (Vertex v = 0; v < 100; ++v) {
        auto list = to_vector(index.list(v));
        list.back().distance += 100;
        index.table.assign(v, list);
    }
    auto report = verify_index(g, m, 2, index);
    EXPECT_EQ(report.violation_count, 100u);
    EXPECT_EQ(report.first.size(), 10u);
}

TEST(VerifyBnGraph, AlgorithmOutputIsClean) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto inst = random_instance(seed, 300);
        auto bn = build_bn_graph(inst.graph).second;
        auto report = verify_bn_graph(inst.graph, bn);
        EXPECT_TRUE(report.ok()) << report.summary();
    }
}

TEST(VerifyBnGraph, InflatedEdgeIsConditionTwo) {
    auto g = generate_grid(6, 6, {1, 9}, 1);
    auto bn = build_bn_graph(g).second;
    auto adj = bn.adjacency();
    const Vertex v = 7;
    const Vertex w = adj[v][0].to;
    adj[v][0].weight += 5;
    for (auto& a : adj[w])
        if (a.to == v) a.weight += 5;
    auto broken = BnGraph::from_adjacency(bn.order(), adj);
    auto report = verify_bn_graph(g, broken);
    ASSERT_FALSE(report.ok());
    bool edge = false;
    for (const auto& x : report.first) edge |= x.kind == "edge-weight";
    EXPECT_TRUE(edge);
}

TEST(VerifyBnGraph, MissingVertexIsConditionOne) {
    auto g = path3();
    auto small = build_bn_graph(make_graph(2, {{0, 1, 1}})).second;
    auto report = verify_bn_graph(g, small);
    ASSERT_EQ(report.violation_count, 1u);
    EXPECT_EQ(report.first[0].kind, "vertex-set");
}

TEST(VerifyBnGraph, DroppedEdgeBreaksDistances) {
    auto g = make_graph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 0, 1}});
    auto bn = build_bn_graph(g).second;
    auto adj = bn.adjacency();
    const Vertex v = 0;
    const Vertex w = adj[v][0].to;
    adj[v].erase(adj[v].begin());
    std::erase_if(adj[w], [&](const WeightedArc& a) { return a.to == v; });
    auto report = verify_bn_graph(g, BnGraph::from_adjacency(bn.order(), adj));
    bool distance = false;
    for (const auto& x : report.first) distance |= x.kind == "distance";
    EXPECT_TRUE(distance);
}
