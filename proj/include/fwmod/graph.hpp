#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fwmod/arm.hpp"

namespace fwmod {

// Coefficients of the linear combination of the sequence, data-reference and
// call graphs. Defaults weight the three sources equally.
struct GraphWeights {
    double alpha = 1.0;  // sequence graph
    double beta = 1.0;   // data-reference graph
    double gamma = 1.0;  // call graph

    void validate() const;  // throws invalid_weights unless all >= 0 and sum > 0
};

// Weighted graph over function entry addresses. Edges are keyed by node
// index; undirected graphs canonicalize keys to (min,max). Self-loops are
// dropped on insertion and weights accumulate.
class FunctionGraph {
public:
    using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;
    using EdgeMap = std::map<EdgeKey, double>;

    FunctionGraph() = default;
    FunctionGraph(std::vector<std::uint64_t> nodes, bool directed, std::string source);

    bool is_directed() const { return directed_; }
    const std::string& source() const { return source_; }
    const std::vector<std::uint64_t>& nodes() const { return nodes_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_node(std::uint64_t addr) const { return index_.count(addr) != 0; }
    std::uint32_t index_of(std::uint64_t addr) const;
    std::uint64_t node_at(std::uint32_t index) const { return nodes_.at(index); }

    void add_edge(std::uint64_t u, std::uint64_t v, double weight);
    double weight_between(std::uint64_t u, std::uint64_t v) const;
    double total_weight() const;

    // Deterministic iteration order (sorted by index pair).
    const EdgeMap& edges() const { return edges_; }

    nlohmann::json to_json() const;
    static FunctionGraph from_json(const nlohmann::json& j);

    bool same_node_set(const FunctionGraph& other) const;

private:
    bool directed_ = false;
    std::string source_;
    std::vector<std::uint64_t> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    EdgeMap edges_;
};

// Directed weight-1 edge from each function to its address successor within
// the same executable section.
FunctionGraph build_sequence_graph(const std::vector<FunctionRecord>& functions);

// Undirected edge between functions sharing at least one data address;
// weight is the count of distinct shared addresses (or 1 in binary mode).
FunctionGraph build_data_reference_graph(const std::vector<std::uint64_t>& nodes,
                                         const std::vector<DataRef>& datarefs,
                                         bool binary_weights = false);

// Directed caller->callee edges weighted by call-site multiplicity.
FunctionGraph build_call_graph(const std::vector<std::uint64_t>& nodes,
                               const std::vector<CallSite>& callsites);

// Undirected linear combination: per unordered pair,
// alpha*(SG both directions) + beta*DRG + gamma*(CG both directions).
// Zero-weight pairs are omitted; the node set is preserved exactly.
FunctionGraph combine(const FunctionGraph& sg, const FunctionGraph& drg, const FunctionGraph& cg,
                      const GraphWeights& w);

}  // namespace fwmod
