#pragma once

// Synchronization-gated Hebbian weight dynamics.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/graph.hpp"
#include "hocl/linalg.hpp"

namespace hocl {

/// Symmetric N x N structural weights with zero diagonal.
/// Writes go through set_symmetric(), so symmetry holds bit-for-bit.
class WeightMatrix {
public:
    WeightMatrix() = default;
    explicit WeightMatrix(std::size_t n) : n_(n), w_(n * n, 0.0) {}

    static WeightMatrix from_dense(const Matrix& m, double tolerance = 1e-12) {
        if (m.rows() != m.cols()) throw ArgumentError("WeightMatrix: matrix must be square");
        WeightMatrix out(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (m(i, i) != 0.0) throw ArgumentError("WeightMatrix: diagonal must be zero");
            for (std::size_t j = i + 1; j < m.cols(); ++j) {
                if (!std::isfinite(m(i, j)) || std::abs(m(i, j) - m(j, i)) > tolerance) {
                    throw ArgumentError("WeightMatrix: matrix must be finite and symmetric");
                }
                out.set_symmetric(i, j, 0.5 * (m(i, j) + m(j, i)));
            }
        }
        return out;
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return w_[i * n_ + j]; }

    void set_symmetric(std::size_t i, std::size_t j, double value) noexcept {
        if (i == j) return;
        w_[i * n_ + j] = value;
        w_[j * n_ + i] = value;
    }

    double squared_frobenius() const noexcept { return squared_norm(w_); }
    double frobenius_norm() const noexcept { return std::sqrt(squared_frobenius()); }

    std::span<const double> data() const noexcept { return w_; }

    bool operator==(const WeightMatrix&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<double> w_;
};

enum class GateMode { Hard, Smooth };

struct PlasticityParams {
    double eta = 0.01;           // Hebbian rate
    double gamma = 0.001;        // decay
    double critical_r = 0.5;     // r_c
    double sharpness = 20.0;     // beta
    GateMode gate_mode = GateMode::Smooth;
    double activation_bound = 1.0;  // M
    bool decay_everywhere = false;  // decay edges outside the active set too

    void validate() const {
        if (!(eta >= 0.0) || !std::isfinite(eta)) throw ArgumentError("PlasticityParams: eta must be >= 0");
        if (!(gamma > 0.0)) throw ArgumentError("PlasticityParams: gamma must be > 0");
        if (!(critical_r > 0.0 && critical_r < 1.0)) throw ArgumentError("PlasticityParams: r_c must be in (0, 1)");
        if (!(sharpness > 0.0)) throw ArgumentError("PlasticityParams: beta must be > 0");
        if (!(activation_bound > 0.0)) throw ArgumentError("PlasticityParams: M must be > 0");
    }
};

// Smooth: 1 / (1 + exp(-beta (r - r_c))).  Hard: 1 if r > r_c else 0.
inline double gate(double r, const PlasticityParams& p) noexcept {
    if (p.gate_mode == GateMode::Hard) return r > p.critical_r ? 1.0 : 0.0;
    const double z = p.sharpness * (r - p.critical_r);
    // split by sign so exp never overflows
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// dG/dr. beta G (1 - G) for the smooth gate; 0 almost everywhere for the hard one.
inline double gate_derivative(double r, const PlasticityParams& p) noexcept {
    if (p.gate_mode == GateMode::Hard) return 0.0;
    const double g = gate(r, p);
    return p.sharpness * g * (1.0 - g);
}

struct HebbianStats {
    double sum_abs_change = 0.0;  // over updated unordered pairs
    std::size_t updated_pairs = 0;
    double gate = 0.0;

    double mean_abs_change() const noexcept {
        return updated_pairs == 0 ? 0.0 : sum_abs_change / static_cast<double>(updated_pairs);
    }
};

inline void check_activations(std::span<const double> x, double bound) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]) || std::abs(x[i]) > bound) {
            throw ContractViolation("hebbian update: activation x[" + std::to_string(i) + "] = " +
                                    std::to_string(x[i]) + " exceeds declared bound M = " +
                                    std::to_string(bound));
        }
    }
}

/// In-place gated Hebbian update on every active edge (i, j), i != j:
///   W_ij <- W_ij + step * (-gamma W_ij + eta x_i x_j G(r))
/// active_edges == nullptr means all pairs. Inactive pairs are left alone
/// unless params.decay_everywhere is set, in which case they decay.
/// Cost is O(edges) without decay_everywhere, O(N^2) with it.
inline HebbianStats apply_hebbian(WeightMatrix& w, std::span<const double> activations, double r,
                                  const PlasticityParams& params, double step = 1.0,
                                  const SparseGraph* active_edges = nullptr) {
    const std::size_t n = w.size();
    require_same_size(n, activations.size(), "hebbian update (activations)");
    if (active_edges) require_same_size(n, active_edges->size(), "hebbian update (graph)");
    check_activations(activations, params.activation_bound);

    HebbianStats stats;
    stats.gate = gate(r, params);
    const double hebb = params.eta * stats.gate;

    auto update = [&](std::size_t i, std::size_t j, bool hebbian) {
        const double old = w(i, j);
        const double delta = step * (-params.gamma * old + (hebbian ? hebb * activations[i] * activations[j] : 0.0));
        w.set_symmetric(i, j, old + delta);
        stats.sum_abs_change += std::abs(delta);
        ++stats.updated_pairs;
    };

    if (active_edges == nullptr) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) update(i, j, true);
        }
    } else if (params.decay_everywhere) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) update(i, j, active_edges->linked(i, j));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j : active_edges->neighbors(i)) {
                if (j == i) continue;
                // each unordered pair once: from the lower index, or from i when j does not list i
                if (j < i && active_edges->contains(j, i)) continue;
                update(i, j, true);
            }
        }
    }
    return stats;
}

inline WeightMatrix hebbian_step(const WeightMatrix& w, std::span<const double> activations, double r,
                                 const PlasticityParams& params, double step = 1.0,
                                 const SparseGraph* active_edges = nullptr) {
    WeightMatrix next = w;
    apply_hebbian(next, activations, r, params, step, active_edges);
    return next;
}

// Ultimate bound on |W|_F: eta M^2 N / gamma.
inline double weight_bound(const PlasticityParams& p, double activation_bound, std::size_t n) {
    if (!(p.gamma > 0.0)) throw ArgumentError("weight_bound: gamma must be > 0");
    return p.eta * activation_bound * activation_bound * static_cast<double>(n) / p.gamma;
}

}  // namespace hocl
