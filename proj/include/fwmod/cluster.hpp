#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fwmod/graph.hpp"

namespace fwmod {

// Assignment of every graph node to exactly one cluster. Ids are dense
// integers from 0, numbered by first appearance in graph node order.
struct Partition {
    std::unordered_map<std::uint64_t, std::uint32_t> assignment;

    std::uint32_t cluster_count() const;
    std::vector<std::vector<std::uint64_t>> clusters() const;  // members sorted per cluster

    nlohmann::json to_json() const;
    static Partition from_json(const nlohmann::json& j);
};

struct ModularityScore {
    double q = 0.0;
};

// Newman modularity over edge weights; Q = sum_c [L_c/m - (d_c/2m)^2].
// An edgeless graph scores 0 by convention.
ModularityScore modularity(const FunctionGraph& graph, const Partition& p);

struct ClusterRunInfo {
    double q = 0.0;                   // modularity of the returned partition
    std::vector<double> gains;        // accepted deltaQ per merge, all > 0
    std::size_t merges = 0;
};

// Agglomerative greedy merging (fast-greedy formulation): start from
// singletons, repeatedly apply the largest positive modularity gain, stop at
// the peak. Ties prefer the merge with the lowest smaller cluster id, then
// the lowest larger id.
Partition cluster_newman(const FunctionGraph& graph, ClusterRunInfo* info = nullptr);

// Exhaustive oracle over all set partitions; graphs of at most 10 nodes.
// Ties broken by fewest clusters, then lexicographic assignment.
Partition brute_force_best_partition(const FunctionGraph& graph);

}  // namespace fwmod
