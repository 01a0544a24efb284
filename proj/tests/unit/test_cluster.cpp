#include <doctest.h>

#include <nlohmann/json.hpp>
#include <random>

#include "fwmod/cluster.hpp"
#include "support/helpers.hpp"

using namespace fwmod;
using fwmod::test::random_graph;
using fwmod::test::two_triangles;

namespace {

Partition partition_of(const FunctionGraph& g, const std::vector<std::uint32_t>& ids) {
    Partition p;
    for (std::size_t i = 0; i < g.node_count(); ++i) p.assignment[g.node_at(i)] = ids[i];
    return p;
}

}  // namespace

TEST_SUITE("community_detection") {

TEST_CASE("modularity of the two-triangle partition is exactly 0.5") {
    auto g = two_triangles();
    auto p = partition_of(g, {0, 0, 0, 1, 1, 1});
    CHECK(modularity(g, p).q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("modularity of a single community is 0") {
    auto g = two_triangles();
    auto p = partition_of(g, {0, 0, 0, 0, 0, 0});
    CHECK(modularity(g, p).q == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("modularity of an edgeless graph is 0 by convention") {
    FunctionGraph g({1, 2, 3}, false, "test");
    Partition p;
    p.assignment = {{1, 0}, {2, 1}, {3, 2}};
    CHECK(modularity(g, p).q == 0.0);
}

TEST_CASE("modularity requires a complete partition") {
    auto g = two_triangles();
    Partition p;
    p.assignment = {{0, 0}, {1, 0}};  // nodes 2..5 missing
    CHECK_ERRC(modularity(g, p), errc::incomplete_partition);
}

TEST_CASE("newman recovers the two triangles at the optimum") {
    auto g = two_triangles();
    ClusterRunInfo info;
    auto p = cluster_newman(g, &info);
    CHECK(p.cluster_count() == 2);
    CHECK(p.assignment.at(0) == p.assignment.at(1));
    CHECK(p.assignment.at(1) == p.assignment.at(2));
    CHECK(p.assignment.at(3) == p.assignment.at(4));
    CHECK(p.assignment.at(4) == p.assignment.at(5));
    CHECK(p.assignment.at(0) != p.assignment.at(3));
    CHECK(info.q == doctest::Approx(0.5).epsilon(1e-9));

    auto oracle = brute_force_best_partition(g);
    CHECK(oracle.cluster_count() == 2);
    CHECK(modularity(g, oracle).q == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("newman leaves an edgeless graph as singletons") {
    FunctionGraph g({5, 6, 7, 8}, false, "test");
    auto p = cluster_newman(g);
    CHECK(p.cluster_count() == 4);
}

TEST_CASE("isolated nodes stay singleton clusters") {
    auto g = two_triangles();
    FunctionGraph with_isolated({0, 1, 2, 3, 4, 5, 99}, false, "test");
    for (const auto& [key, w] : g.edges()) {
        with_isolated.add_edge(g.node_at(key.first), g.node_at(key.second), w);
    }
    auto p = cluster_newman(with_isolated);
    CHECK(p.cluster_count() == 3);
    const auto iso = p.assignment.at(99);
    for (auto node : {0, 1, 2, 3, 4, 5}) CHECK(p.assignment.at(node) != iso);
}

TEST_CASE("greedy Q matches a from-scratch modularity computation") {
    std::mt19937 rng(11);
    for (int round = 0; round < 20; ++round) {
        auto g = random_graph(rng, 6 + round % 5, 0.5);
        ClusterRunInfo info;
        auto p = cluster_newman(g, &info);
        CHECK(modularity(g, p).q == doctest::Approx(info.q).epsilon(1e-9));
    }
}

TEST_CASE("every accepted merge gain is strictly positive") {
    std::mt19937 rng(13);
    for (int round = 0; round < 20; ++round) {
        auto g = random_graph(rng, 8, 0.5);
        ClusterRunInfo info;
        cluster_newman(g, &info);
        for (double gain : info.gains) CHECK(gain > 0.0);
    }
}

TEST_CASE("clustering is deterministic across runs") {
    std::mt19937 rng(17);
    auto g = random_graph(rng, 10, 0.4);
    auto a = cluster_newman(g);
    auto b = cluster_newman(g);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("greedy never beats the exhaustive oracle") {
    std::mt19937 rng(19);
    for (int round = 0; round < 40; ++round) {
        auto g = random_graph(rng, 5 + round % 4, 0.6);
        double greedy = modularity(g, cluster_newman(g)).q;
        double best = modularity(g, brute_force_best_partition(g)).q;
        CHECK(greedy <= best + 1e-9);
    }
}

TEST_CASE("oracle rejects more than 10 nodes and handles one node") {
    FunctionGraph big(std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, false, "t");
    CHECK_ERRC(brute_force_best_partition(big), errc::too_large);

    FunctionGraph single(std::vector<std::uint64_t>{42}, false, "t");
    auto p = brute_force_best_partition(single);
    CHECK(p.cluster_count() == 1);
    CHECK(p.assignment.at(42) == 0);
}

TEST_CASE("partition ids are dense and ordered by first appearance") {
    auto g = two_triangles();
    auto p = cluster_newman(g);
    CHECK(p.assignment.at(0) == 0);  // node 0 appears first
    CHECK(p.assignment.at(3) == 1);
}

TEST_CASE("partition json round-trips") {
    auto g = two_triangles();
    auto p = cluster_newman(g);
    auto j = p.to_json();
    CHECK(j.at("clusters").size() == 2);
    auto back = Partition::from_json(j);
    CHECK(back.assignment == p.assignment);
}

}  // TEST_SUITE
