#include "fwmod/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

std::string hex_addr(std::uint64_t addr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%08llx", static_cast<unsigned long long>(addr));
    return buf;
}

}  // namespace

void GraphWeights::validate() const {
    if (alpha < 0 || beta < 0 || gamma < 0) {
        raise(errc::invalid_weights, "graph coefficients must be non-negative");
    }
    if (alpha + beta + gamma <= 0) {
        raise(errc::invalid_weights, "graph coefficients must not all be zero");
    }
}

FunctionGraph::FunctionGraph(std::vector<std::uint64_t> nodes, bool directed, std::string source)
    : directed_(directed), source_(std::move(source)), nodes_(std::move(nodes)) {
    index_.reserve(nodes_.size());
    for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
        auto [_, inserted] = index_.emplace(nodes_[i], i);
        if (!inserted) raise(errc::internal, "duplicate graph node " + hex_addr(nodes_[i]));
    }
}

std::uint32_t FunctionGraph::index_of(std::uint64_t addr) const {
    auto it = index_.find(addr);
    if (it == index_.end()) raise(errc::internal, "unknown graph node " + hex_addr(addr));
    return it->second;
}

void FunctionGraph::add_edge(std::uint64_t u, std::uint64_t v, double weight) {
    if (weight < 0) raise(errc::internal, "negative edge weight");
    if (u == v) return;  // no self-loops
    EdgeKey key{index_of(u), index_of(v)};
    if (!directed_ && key.first > key.second) std::swap(key.first, key.second);
    edges_[key] += weight;
}

double FunctionGraph::weight_between(std::uint64_t u, std::uint64_t v) const {
    if (!has_node(u) || !has_node(v) || u == v) return 0.0;
    EdgeKey key{index_of(u), index_of(v)};
    if (!directed_ && key.first > key.second) std::swap(key.first, key.second);
    auto it = edges_.find(key);
    return it == edges_.end() ? 0.0 : it->second;
}

double FunctionGraph::total_weight() const {
    double total = 0.0;
    for (const auto& [key, w] : edges_) total += w;
    return total;
}

bool FunctionGraph::same_node_set(const FunctionGraph& other) const {
    if (nodes_.size() != other.nodes_.size()) return false;
    for (auto n : nodes_) {
        if (!other.has_node(n)) return false;
    }
    return true;
}

nlohmann::json FunctionGraph::to_json() const {
    nlohmann::json j;
    j["directed"] = directed_;
    j["source"] = source_;
    auto& nodes = j["nodes"] = nlohmann::json::array();
    for (auto n : nodes_) nodes.push_back(hex_addr(n));
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [key, w] : edges_) {
        edges.push_back({{"u", hex_addr(nodes_[key.first])},
                         {"v", hex_addr(nodes_[key.second])},
                         {"weight", w},
                         {"source", source_}});
    }
    return j;
}

FunctionGraph FunctionGraph::from_json(const nlohmann::json& j) {
    std::vector<std::uint64_t> nodes;
    for (const auto& n : j.at("nodes")) {
        nodes.push_back(std::stoull(n.get<std::string>(), nullptr, 16));
    }
    FunctionGraph g(std::move(nodes), j.at("directed").get<bool>(),
                    j.at("source").get<std::string>());
    for (const auto& e : j.at("edges")) {
        g.add_edge(std::stoull(e.at("u").get<std::string>(), nullptr, 16),
                   std::stoull(e.at("v").get<std::string>(), nullptr, 16),
                   e.at("weight").get<double>());
    }
    return g;
}

FunctionGraph build_sequence_graph(const std::vector<FunctionRecord>& functions) {
    std::vector<std::uint64_t> nodes;
    nodes.reserve(functions.size());
    for (const auto& f : functions) nodes.push_back(f.entry);

    FunctionGraph g(std::move(nodes), /*directed=*/true, "sg");
    for (std::size_t i = 1; i < functions.size(); ++i) {
        if (functions[i].section_vaddr != functions[i - 1].section_vaddr) continue;
        g.add_edge(functions[i - 1].entry, functions[i].entry, 1.0);
    }
    return g;
}

FunctionGraph build_data_reference_graph(const std::vector<std::uint64_t>& nodes,
                                         const std::vector<DataRef>& datarefs,
                                         bool binary_weights) {
    FunctionGraph g(nodes, /*directed=*/false, "drg");

    // data address -> functions touching it (deduplicated)
    std::map<std::uint64_t, std::vector<std::uint64_t>> by_addr;
    std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
    for (const auto& ref : datarefs) {
        if (seen.insert({ref.function, ref.data_addr}).second) {
            by_addr[ref.data_addr].push_back(ref.function);
        }
    }

    std::map<std::pair<std::uint64_t, std::uint64_t>, double> shared;
    for (auto& [addr, funcs] : by_addr) {
        std::sort(funcs.begin(), funcs.end());
        for (std::size_t i = 0; i < funcs.size(); ++i) {
            for (std::size_t j = i + 1; j < funcs.size(); ++j) {
                shared[{funcs[i], funcs[j]}] += 1.0;
            }
        }
    }
    for (const auto& [pair, count] : shared) {
        g.add_edge(pair.first, pair.second, binary_weights ? 1.0 : count);
    }
    return g;
}

FunctionGraph build_call_graph(const std::vector<std::uint64_t>& nodes,
                               const std::vector<CallSite>& callsites) {
    FunctionGraph g(nodes, /*directed=*/true, "cg");
    for (const auto& site : callsites) {
        g.add_edge(site.caller, site.callee, 1.0);  // self-calls dropped by the graph
    }
    return g;
}

FunctionGraph combine(const FunctionGraph& sg, const FunctionGraph& drg, const FunctionGraph& cg,
                      const GraphWeights& w) {
    w.validate();
    if (!sg.same_node_set(drg) || !sg.same_node_set(cg)) {
        raise(errc::node_set_mismatch, "sequence, data-reference and call graphs must share nodes");
    }

    FunctionGraph g(sg.nodes(), /*directed=*/false, "combined");
    auto accumulate = [&g](const FunctionGraph& src, double coeff) {
        if (coeff == 0.0) return;
        for (const auto& [key, weight] : src.edges()) {
            g.add_edge(src.node_at(key.first), src.node_at(key.second), coeff * weight);
        }
    };
    accumulate(sg, w.alpha);
    accumulate(drg, w.beta);
    accumulate(cg, w.gamma);
    return g;
}

}  // namespace fwmod
