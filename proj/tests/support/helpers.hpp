#pragma once

#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fwmod/errors.hpp"
#include "fwmod/graph.hpp"

namespace fwmod::test {

// Asserts that `expr` throws an Error with the given code.
#define CHECK_ERRC(expr, expected_code)                       \
    do {                                                      \
        bool thrown_ = false;                                 \
        try {                                                 \
            (void)(expr);                                     \
        } catch (const fwmod::Error& e_) {                    \
            thrown_ = true;                                   \
            CHECK(e_.code() == (expected_code));              \
        }                                                     \
        CHECK_MESSAGE(thrown_, "expected " #expr " to throw"); \
    } while (0)

// Unique scratch directory, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<unsigned> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("fwmod_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        auto file = path / name;
        std::filesystem::create_directories(file.parent_path());
        std::ofstream out(file, std::ios::binary);
        out << content;
        return file;
    }
};

// Two disjoint unit-weight triangles on nodes 0..5.
inline FunctionGraph two_triangles() {
    FunctionGraph g({0, 1, 2, 3, 4, 5}, /*directed=*/false, "test");
    g.add_edge(0, 1, 1.0);
    g.add_edge(1, 2, 1.0);
    g.add_edge(0, 2, 1.0);
    g.add_edge(3, 4, 1.0);
    g.add_edge(4, 5, 1.0);
    g.add_edge(3, 5, 1.0);
    return g;
}

// Deterministic uniform double in (0, 1]; mt19937 is fully specified, so
// identical seeds give identical graphs on every platform.
inline double uniform_unit(std::mt19937& rng) {
    return (static_cast<double>(rng()) + 1.0) / (static_cast<double>(rng.max()) + 1.0);
}

// Random graph with n nodes; each edge present with probability p and a
// weight in (0,1].
inline FunctionGraph random_graph(std::mt19937& rng, std::size_t n, double p) {
    std::vector<std::uint64_t> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
    FunctionGraph g(std::move(nodes), false, "random");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double coin = uniform_unit(rng);
            const double weight = uniform_unit(rng);
            if (coin <= p) g.add_edge(i, j, weight);
        }
    }
    return g;
}

// Planted-partition benchmark: `communities` blocks of `per_community`
// nodes; unit-weight edges with probability p_in inside a block and p_out
// across blocks. One rng draw per unordered pair, in index order.
inline FunctionGraph planted_partition_graph(unsigned seed, std::size_t communities,
                                             std::size_t per_community, double p_in,
                                             double p_out) {
    const std::size_t n = communities * per_community;
    std::vector<std::uint64_t> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
    FunctionGraph g(std::move(nodes), false, "planted");

    std::mt19937 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double p = (i / per_community == j / per_community) ? p_in : p_out;
            if (uniform_unit(rng) <= p) g.add_edge(i, j, 1.0);
        }
    }
    return g;
}

}  // namespace fwmod::test
