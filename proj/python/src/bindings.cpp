#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "fwmod/arm.hpp"
#include "fwmod/binary.hpp"
#include "fwmod/categorize.hpp"
#include "fwmod/cluster.hpp"
#include "fwmod/corpus.hpp"
#include "fwmod/errors.hpp"
#include "fwmod/evaluate.hpp"
#include "fwmod/graph.hpp"
#include "fwmod/normalize.hpp"
#include "fwmod/report.hpp"

namespace py = pybind11;
using namespace fwmod;

namespace {

// dict-of-clusters view of a partition
py::dict partition_to_dict(const Partition& p) {
    py::dict out;
    auto clusters = p.clusters();
    for (std::size_t id = 0; id < clusters.size(); ++id) {
        py::list members;
        for (auto addr : clusters[id]) members.append(addr);
        out[py::int_(id)] = members;
    }
    return out;
}

Partition partition_from_dict(const py::dict& d) {
    Partition p;
    for (const auto& [key, value] : d) {
        auto id = key.cast<std::uint32_t>();
        for (const auto& addr : value.cast<py::list>()) {
            p.assignment[addr.cast<std::uint64_t>()] = id;
        }
    }
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Firmware module analysis: ARM ELF decomposition, Newman clustering, "
              "source normalization and cluster evaluation metrics";

    py::register_exception<Error>(m, "FwmodError");

    // ---- binary model ----
    py::class_<Section>(m, "Section")
        .def_readonly("name", &Section::name)
        .def_readonly("vaddr", &Section::vaddr)
        .def_readonly("size", &Section::size)
        .def_property_readonly("executable", [](const Section& s) { return s.flags.executable; })
        .def_property_readonly("has_file_bytes",
                               [](const Section& s) { return s.flags.has_file_bytes; });

    py::class_<SymbolEntry>(m, "SymbolEntry")
        .def_readonly("name", &SymbolEntry::name)
        .def_readonly("addr", &SymbolEntry::addr)
        .def_readonly("size", &SymbolEntry::size)
        .def_readonly("thumb", &SymbolEntry::thumb)
        .def_property_readonly("is_function",
                               [](const SymbolEntry& s) { return s.kind == SymbolKind::function; });

    py::class_<BinaryImage>(m, "BinaryImage")
        .def_property_readonly("path", [](const BinaryImage& b) { return b.path().string(); })
        .def_property_readonly("machine", &BinaryImage::machine)
        .def_property_readonly("entry_point", &BinaryImage::entry_point)
        .def_property_readonly("sections", &BinaryImage::sections)
        .def_property_readonly("symbols", &BinaryImage::symbols);

    m.def("load_elf", &load_elf, py::arg("path"));
    m.def("data_sections", [](const BinaryImage& image) {
        std::vector<Section> out;
        for (const auto* s : data_sections(image)) out.push_back(*s);
        return out;
    });
    m.def("build_name_address_map", [](const BinaryImage& image) {
        py::dict out;
        for (const auto& e : build_name_address_map(image).entries) {
            out[py::str(e.name)] = e.addr;
        }
        return out;
    });

    // ---- arm analysis ----
    py::class_<FunctionRecord>(m, "FunctionRecord")
        .def_readonly("entry", &FunctionRecord::entry)
        .def_readonly("end", &FunctionRecord::end)
        .def_readonly("name", &FunctionRecord::name)
        .def_readonly("thumb", &FunctionRecord::thumb);

    py::class_<CallSite>(m, "CallSite")
        .def_readonly("caller", &CallSite::caller)
        .def_readonly("callee", &CallSite::callee)
        .def_readonly("site", &CallSite::site);

    py::class_<DataRef>(m, "DataRef")
        .def_readonly("function", &DataRef::function)
        .def_readonly("data_addr", &DataRef::data_addr);

    m.def("recover_functions", &recover_functions, py::arg("image"),
          py::arg("seeds") = std::vector<std::uint64_t>{});
    m.def("extract_calls",
          [](const BinaryImage& image, const std::vector<FunctionRecord>& functions) {
              return extract_calls(image, functions, nullptr);
          });
    m.def("extract_data_refs", &extract_data_refs);

    // ---- graphs and clustering ----
    py::class_<FunctionGraph>(m, "FunctionGraph")
        .def(py::init([](std::vector<std::uint64_t> nodes, bool directed, std::string source) {
                 return FunctionGraph(std::move(nodes), directed, std::move(source));
             }),
             py::arg("nodes"), py::arg("directed") = false, py::arg("source") = "graph")
        .def_property_readonly("nodes", &FunctionGraph::nodes)
        .def_property_readonly("directed", &FunctionGraph::is_directed)
        .def("add_edge", &FunctionGraph::add_edge, py::arg("u"), py::arg("v"), py::arg("weight"))
        .def("weight_between", &FunctionGraph::weight_between)
        .def("total_weight", &FunctionGraph::total_weight)
        .def("edge_count", &FunctionGraph::edge_count);

    py::class_<GraphWeights>(m, "GraphWeights")
        .def(py::init([](double alpha, double beta, double gamma) {
                 return GraphWeights{alpha, beta, gamma};
             }),
             py::arg("alpha") = 1.0, py::arg("beta") = 1.0, py::arg("gamma") = 1.0)
        .def_readwrite("alpha", &GraphWeights::alpha)
        .def_readwrite("beta", &GraphWeights::beta)
        .def_readwrite("gamma", &GraphWeights::gamma);

    m.def("build_sequence_graph", &build_sequence_graph);
    m.def("build_data_reference_graph", &build_data_reference_graph, py::arg("nodes"),
          py::arg("datarefs"), py::arg("binary_weights") = false);
    m.def("build_call_graph", &build_call_graph);
    m.def("combine", &combine);

    m.def("modularity", [](const FunctionGraph& g, const py::dict& partition) {
        return modularity(g, partition_from_dict(partition)).q;
    });
    m.def("cluster_newman", [](const FunctionGraph& g) {
        return partition_to_dict(cluster_newman(g));
    });
    m.def("brute_force_best_partition", [](const FunctionGraph& g) {
        return partition_to_dict(brute_force_best_partition(g));
    });

    // ---- corpus / normalization ----
    m.def("count_nonblank_lines",
          [](const std::string& text) { return count_nonblank_lines(text); });
    m.def("filter_by_length",
          [](const std::vector<std::pair<std::uint64_t, std::string>>& functions, int threshold) {
              std::vector<DecompiledFunction> in;
              for (const auto& [entry, text] : functions) {
                  in.push_back({entry, text, count_nonblank_lines(text)});
              }
              std::vector<std::pair<std::uint64_t, std::string>> out;
              for (const auto& f : filter_by_length(in, threshold)) {
                  out.emplace_back(f.entry, f.text);
              }
              return out;
          },
          py::arg("functions"), py::arg("threshold") = 15);

    m.def("strip_comments", [](const std::string& text) { return strip_comments(text); });
    m.def("anonymize_identifiers", [](const std::string& name, const std::string& body) {
        auto result = anonymize_identifiers({name, {}, body});
        return py::make_tuple(result.normalized_text, result.rename_map);
    });

    // ---- categorization ----
    m.def("parse_ranking", [](const std::string& raw) {
        std::vector<std::string> out;
        for (Category c : parse_ranking(raw).ordered) out.emplace_back(category_name(c));
        return out;
    });
    m.def("select_top_k", [](const std::vector<std::string>& ranking, int k) {
        CategoryRanking r;
        if (ranking.size() != 5) raise(errc::bad_k, "ranking must list five categories");
        for (std::size_t i = 0; i < 5; ++i) {
            auto c = category_from_name(ranking[i]);
            if (!c) raise(errc::unknown_category, ranking[i]);
            r.ordered[i] = *c;
        }
        std::vector<std::string> out;
        for (Category c : select_top_k(r, k, "module").selected) {
            out.emplace_back(category_name(c));
        }
        return out;
    });

    // ---- evaluation ----
    m.def("cosine_similarity", &cosine_similarity);
    m.def("weighted_metrics",
          [](const std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>>&
                 raw_matches) {
              std::vector<ModuleMatch> matches;
              for (const auto& [tp, fp, fn, n] : raw_matches) {
                  ModuleMatch m2;
                  m2.tp = tp;
                  m2.fp = fp;
                  m2.fn = fn;
                  m2.n = n;
                  m2.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
                  m2.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
                  m2.f1 = m2.precision + m2.recall == 0.0
                              ? 0.0
                              : 2 * m2.precision * m2.recall / (m2.precision + m2.recall);
                  matches.push_back(m2);
              }
              auto report = weighted_metrics(matches);
              return py::make_tuple(report.p_w, report.r_w, report.f1_w);
          },
          "Weighted P/R/F1 from (tp, fp, fn, n) tuples");
    m.def("match_and_score", [](const py::dict& partition, const py::dict& ground_truth) {
        Partition p = partition_from_dict(partition);
        GroundTruthModules gt;
        for (const auto& [addr, name] : ground_truth) {
            gt.mapping[addr.cast<std::uint64_t>()] = name.cast<std::string>();
        }
        auto report = weighted_metrics(match_clusters(p, gt));
        return py::make_tuple(report.p_w, report.r_w, report.f1_w);
    });
    m.def("format_hours", &format_hours);
}
