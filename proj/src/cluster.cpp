#include "fwmod/cluster.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <queue>

#include <nlohmann/json.hpp>

#include "fwmod/errors.hpp"

namespace fwmod {

namespace {

std::string hex_addr(std::uint64_t addr) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "0x%08llx", static_cast<unsigned long long>(addr));
    return buf;
}

// Renumber cluster ids densely from 0 by first appearance in node order.
Partition densify(const FunctionGraph& graph,
                  const std::unordered_map<std::uint64_t, std::uint32_t>& raw) {
    Partition p;
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    for (auto node : graph.nodes()) {
        std::uint32_t old_id = raw.at(node);
        auto [it, inserted] = remap.emplace(old_id, static_cast<std::uint32_t>(remap.size()));
        p.assignment[node] = it->second;
    }
    return p;
}

}  // namespace

std::uint32_t Partition::cluster_count() const {
    std::uint32_t max_id = 0;
    bool any = false;
    for (const auto& [node, id] : assignment) {
        max_id = std::max(max_id, id);
        any = true;
    }
    return any ? max_id + 1 : 0;
}

std::vector<std::vector<std::uint64_t>> Partition::clusters() const {
    std::vector<std::vector<std::uint64_t>> out(cluster_count());
    for (const auto& [node, id] : assignment) out[id].push_back(node);
    for (auto& members : out) std::sort(members.begin(), members.end());
    return out;
}

nlohmann::json Partition::to_json() const {
    nlohmann::json clusters_json = nlohmann::json::object();
    auto groups = clusters();
    for (std::size_t id = 0; id < groups.size(); ++id) {
        nlohmann::json members = nlohmann::json::array();
        for (auto addr : groups[id]) members.push_back(hex_addr(addr));
        clusters_json[std::to_string(id)] = std::move(members);
    }
    return nlohmann::json{{"clusters", std::move(clusters_json)}};
}

Partition Partition::from_json(const nlohmann::json& j) {
    Partition p;
    for (const auto& [id_str, members] : j.at("clusters").items()) {
        auto id = static_cast<std::uint32_t>(std::stoul(id_str));
        for (const auto& addr : members) {
            p.assignment[std::stoull(addr.get<std::string>(), nullptr, 16)] = id;
        }
    }
    return p;
}

ModularityScore modularity(const FunctionGraph& graph, const Partition& p) {
    for (auto node : graph.nodes()) {
        if (!p.assignment.count(node)) {
            raise(errc::incomplete_partition, "node " + hex_addr(node) + " has no cluster");
        }
    }
    double m = graph.total_weight();
    if (m == 0.0) return {0.0};

    std::map<std::uint32_t, double> intra;   // L_c: intra-cluster edge weight
    std::map<std::uint32_t, double> degree;  // d_c: weighted degree sum
    for (const auto& [key, w] : graph.edges()) {
        std::uint32_t cu = p.assignment.at(graph.node_at(key.first));
        std::uint32_t cv = p.assignment.at(graph.node_at(key.second));
        degree[cu] += w;
        degree[cv] += w;
        if (cu == cv) intra[cu] += w;
    }

    double q = 0.0;
    for (const auto& [cluster, d] : degree) {
        auto it = intra.find(cluster);
        double l = it == intra.end() ? 0.0 : it->second;
        q += l / m - (d / (2.0 * m)) * (d / (2.0 * m));
    }
    return {q};
}

Partition cluster_newman(const FunctionGraph& graph, ClusterRunInfo* info) {
    const auto n = static_cast<std::uint32_t>(graph.node_count());
    std::unordered_map<std::uint64_t, std::uint32_t> raw;
    for (std::uint32_t i = 0; i < n; ++i) raw[graph.node_at(i)] = i;

    const double m = graph.total_weight();
    if (info) *info = {};
    if (m == 0.0 || n == 0) {
        Partition p = densify(graph, raw);
        return p;
    }

    // Community state: weights between community pairs, weighted degrees.
    std::vector<std::map<std::uint32_t, double>> between(n);
    std::vector<double> degree(n, 0.0);
    std::vector<bool> alive(n, true);
    for (const auto& [key, w] : graph.edges()) {
        between[key.first][key.second] += w;
        between[key.second][key.first] += w;
        degree[key.first] += w;
        degree[key.second] += w;
    }

    const double two_m_sq = 2.0 * m * m;
    auto delta_q = [&](std::uint32_t i, std::uint32_t j, double w_ij) {
        return w_ij / m - degree[i] * degree[j] / two_m_sq;
    };

    struct Candidate {
        double dq;
        std::uint32_t i, j;  // i < j
    };
    struct Worse {
        bool operator()(const Candidate& a, const Candidate& b) const {
            if (a.dq != b.dq) return a.dq < b.dq;
            if (a.i != b.i) return a.i > b.i;
            return a.j > b.j;
        }
    };
    std::priority_queue<Candidate, std::vector<Candidate>, Worse> heap;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (const auto& [j, w] : between[i]) {
            if (i < j) heap.push({delta_q(i, j, w), i, j});
        }
    }

    double q = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
        q -= (degree[i] / (2.0 * m)) * (degree[i] / (2.0 * m));
    }

    std::vector<std::pair<std::uint32_t, std::uint32_t>> merge_log;
    std::vector<double> gains;

    while (!heap.empty()) {
        Candidate top = heap.top();
        heap.pop();
        if (!alive[top.i] || !alive[top.j]) continue;
        auto it = between[top.i].find(top.j);
        if (it == between[top.i].end()) continue;
        if (delta_q(top.i, top.j, it->second) != top.dq) continue;  // stale entry
        if (top.dq <= 0.0) break;  // heap max is non-positive: at the peak

        const std::uint32_t keep = top.i, gone = top.j;
        q += top.dq;
        gains.push_back(top.dq);
        merge_log.emplace_back(keep, gone);

        between[keep].erase(gone);
        between[gone].erase(keep);
        for (const auto& [nbr, w] : between[gone]) {
            between[keep][nbr] += w;
            between[nbr].erase(gone);
            between[nbr][keep] = between[keep][nbr];
        }
        between[gone].clear();
        degree[keep] += degree[gone];
        alive[gone] = false;

        for (const auto& [nbr, w] : between[keep]) {
            std::uint32_t a = std::min(keep, nbr), b = std::max(keep, nbr);
            heap.push({delta_q(a, b, w), a, b});
        }
    }

    // Union-find replay of the merge log.
    std::vector<std::uint32_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& [keep, gone] : merge_log) parent[find(gone)] = find(keep);

    for (std::uint32_t i = 0; i < n; ++i) raw[graph.node_at(i)] = find(i);
    Partition p = densify(graph, raw);

    if (info) {
        info->q = q;
        info->gains = std::move(gains);
        info->merges = merge_log.size();
    }
    return p;
}

Partition brute_force_best_partition(const FunctionGraph& graph) {
    const auto n = graph.node_count();
    if (n > 10) raise(errc::too_large, "brute-force oracle is limited to 10 nodes");

    std::unordered_map<std::uint64_t, std::uint32_t> raw;
    if (n == 0) return densify(graph, raw);

    const double m = graph.total_weight();

    // Edges by node index for fast per-partition scoring.
    struct E {
        std::uint32_t u, v;
        double w;
    };
    std::vector<E> edges;
    edges.reserve(graph.edge_count());
    for (const auto& [key, w] : graph.edges()) edges.push_back({key.first, key.second, w});
    std::vector<double> node_degree(n, 0.0);
    for (const auto& e : edges) {
        node_degree[e.u] += e.w;
        node_degree[e.v] += e.w;
    }

    auto score = [&](const std::vector<std::uint32_t>& assign, std::uint32_t k) {
        if (m == 0.0) return 0.0;
        std::vector<double> intra(k, 0.0), degree(k, 0.0);
        for (std::uint32_t i = 0; i < n; ++i) degree[assign[i]] += node_degree[i];
        for (const auto& e : edges) {
            if (assign[e.u] == assign[e.v]) intra[assign[e.u]] += e.w;
        }
        double q = 0.0;
        for (std::uint32_t c = 0; c < k; ++c) {
            q += intra[c] / m - (degree[c] / (2.0 * m)) * (degree[c] / (2.0 * m));
        }
        return q;
    };

    // Enumerate restricted growth strings in lexicographic order; the first
    // partition seen at the best score already satisfies the tie-break for
    // lexicographic order, so only fewer-clusters can displace it.
    std::vector<std::uint32_t> assign(n, 0), best_assign(n, 0);
    double best_q = score(assign, 1);
    std::uint32_t best_k = 1;

    auto recurse = [&](auto&& self, std::size_t pos, std::uint32_t used) -> void {
        if (pos == n) {
            double q = score(assign, used);
            if (q > best_q || (q == best_q && used < best_k)) {
                best_q = q;
                best_k = used;
                best_assign = assign;
            }
            return;
        }
        for (std::uint32_t c = 0; c <= used; ++c) {
            assign[pos] = c;
            self(self, pos + 1, std::max(used, c + 1));
        }
    };
    recurse(recurse, 1, 1);  // node 0 is always cluster 0

    for (std::uint32_t i = 0; i < n; ++i) raw[graph.node_at(i)] = best_assign[i];
    return densify(graph, raw);
}

}  // namespace fwmod
