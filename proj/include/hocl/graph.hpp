#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/geometry.hpp"

namespace hocl {

/// Per-unit neighborhoods N_i = { j : d_H(z_i, z_j) < delta }, each sorted
/// ascending and always containing i itself. Without a k-cap the relation is
/// symmetric; with a cap each row keeps its k_cap nearest members.
struct SparseGraph {
    std::vector<std::vector<std::size_t>> neighborhoods;
    double delta = 0.0;
    std::optional<std::size_t> k_cap;

    std::size_t size() const noexcept { return neighborhoods.size(); }

    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighborhoods[i]; }

    bool contains(std::size_t i, std::size_t j) const {
        const auto& row = neighborhoods[i];
        return std::binary_search(row.begin(), row.end(), j);
    }

    // Edge (i, j) is active when either endpoint lists the other.
    bool linked(std::size_t i, std::size_t j) const { return contains(i, j) || contains(j, i); }

    std::size_t entry_count() const noexcept {
        std::size_t total = 0;
        for (const auto& row : neighborhoods) total += row.size();
        return total;
    }

    std::size_t max_degree() const noexcept {
        std::size_t k = 0;
        for (const auto& row : neighborhoods) k = std::max(k, row.size());
        return k;
    }

    static SparseGraph complete(std::size_t n) {
        SparseGraph g;
        g.delta = std::numeric_limits<double>::infinity();
        g.neighborhoods.resize(n);
        for (auto& row : g.neighborhoods) {
            row.resize(n);
            for (std::size_t j = 0; j < n; ++j) row[j] = j;
        }
        return g;
    }
};

/// Row-sparse matrix whose row i is aligned with a graph neighborhood:
/// values[i][p] is the entry at column cols[i][p].
struct SparseRows {
    std::vector<std::vector<std::size_t>> cols;
    std::vector<std::vector<double>> values;

    std::size_t rows() const noexcept { return cols.size(); }

    double at(std::size_t i, std::size_t j) const {
        const auto& c = cols[i];
        auto it = std::lower_bound(c.begin(), c.end(), j);
        if (it == c.end() || *it != j) return 0.0;
        return values[i][static_cast<std::size_t>(it - c.begin())];
    }
};

inline SparseGraph build_graph(const std::vector<PoincarePoint>& embeddings, double delta,
                               std::optional<std::size_t> k_cap = std::nullopt) {
    if (embeddings.empty()) throw ArgumentError("build_graph: no embeddings");
    if (!(delta > 0.0)) throw ArgumentError("build_graph: delta must be > 0");
    if (k_cap && *k_cap == 0) throw ArgumentError("build_graph: k_cap must be >= 1");
    const std::size_t dim = embeddings.front().dim();
    for (const auto& z : embeddings) require_same_size(dim, z.dim(), "build_graph");

    const std::size_t n = embeddings.size();
    SparseGraph g;
    g.delta = delta;
    g.k_cap = k_cap;
    g.neighborhoods.resize(n);

    std::vector<std::pair<double, std::size_t>> candidates;
    for (std::size_t i = 0; i < n; ++i) {
        candidates.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d = hyperbolic_distance(embeddings[i], embeddings[j]);
            if (d < delta) candidates.emplace_back(d, j);
        }
        auto& row = g.neighborhoods[i];
        row.push_back(i);
        if (k_cap && candidates.size() + 1 > *k_cap) {
            const std::size_t keep = *k_cap - 1;
            std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                              candidates.end());
            candidates.resize(keep);
        }
        for (const auto& c : candidates) row.push_back(c.second);
        std::sort(row.begin(), row.end());
    }
    return g;
}

// sum_i |N_i| / N^2
inline double density(const SparseGraph& g) {
    const double n = static_cast<double>(g.size());
    if (n == 0.0) throw ArgumentError("density: empty graph");
    return static_cast<double>(g.entry_count()) / (n * n);
}

}  // namespace hocl
