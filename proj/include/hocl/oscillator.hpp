#pragma once

// Kuramoto phase dynamics, order parameters and synchronization-based
// attention.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/graph.hpp"
#include "hocl/linalg.hpp"

namespace hocl {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Maps any finite angle into [0, 2 pi).
inline double wrap_phase(double theta) noexcept {
    double w = std::fmod(theta, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod of a tiny negative can round up to 2 pi
    return w;
}

// Signed angular difference wrapped into (-pi, pi].
inline double wrap_signed(double delta) noexcept {
    double w = wrap_phase(delta + std::numbers::pi) - std::numbers::pi;
    if (w <= -std::numbers::pi) w += kTwoPi;
    return w;
}

enum class CouplingVariant {
    MeanFieldClassical,  // omega_i + (K/N) sum_j sin(theta_j - theta_i)
    OrderGatedKernel,    // omega_i + K r sum_j C(omega_i, omega_j) sin(theta_j - theta_i)
    SparseLocal,         // same, restricted to N_i with the local order parameter r_{N_i}
};

inline const char* to_string(CouplingVariant v) noexcept {
    switch (v) {
        case CouplingVariant::MeanFieldClassical: return "mean_field_classical";
        case CouplingVariant::OrderGatedKernel: return "order_gated_kernel";
        case CouplingVariant::SparseLocal: return "sparse_local";
    }
    return "?";
}

struct OscillatorState {
    Vector phases;       // radians, in [0, 2 pi)
    Vector frequencies;  // radians per unit time
    double coupling = 1.0;
    double kernel_bandwidth = 1.0;

    std::size_t size() const noexcept { return phases.size(); }

    void validate() const {
        if (phases.empty()) throw ArgumentError("OscillatorState: N must be >= 1");
        require_same_size(phases.size(), frequencies.size(), "OscillatorState");
        if (!(coupling > 0.0)) throw ArgumentError("OscillatorState: K must be > 0");
        if (!(kernel_bandwidth > 0.0)) throw ArgumentError("OscillatorState: sigma_C must be > 0");
        if (!all_finite(phases) || !all_finite(frequencies)) {
            throw ArgumentError("OscillatorState: non-finite phase or frequency");
        }
    }
};

inline OscillatorState make_oscillator_state(Vector phases, Vector frequencies, double coupling,
                                             double kernel_bandwidth) {
    OscillatorState s{std::move(phases), std::move(frequencies), coupling, kernel_bandwidth};
    s.validate();
    for (double& p : s.phases) p = wrap_phase(p);
    return s;
}

// Shifts frequencies to zero mean (co-rotating frame).
inline void center_frequencies(Vector& frequencies) noexcept {
    if (frequencies.empty()) return;
    double mean = 0.0;
    for (double w : frequencies) mean += w;
    mean /= static_cast<double>(frequencies.size());
    for (double& w : frequencies) w -= mean;
}

// Gaussian compatibility kernel exp(-(w_i - w_j)^2 / (2 sigma^2)).
inline double compatibility(double omega_i, double omega_j, double bandwidth) {
    if (!(bandwidth > 0.0)) throw ArgumentError("compatibility: sigma_C must be > 0");
    const double d = omega_i - omega_j;
    return std::exp(-d * d / (2.0 * bandwidth * bandwidth));
}

struct OrderParameter {
    double r = 0.0;
    double psi = 0.0;  // 0 when r < 1e-12
};

inline constexpr double kIncoherentR = 1e-12;

inline OrderParameter order_parameter(std::span<const double> phases) {
    if (phases.empty()) throw ArgumentError("order_parameter: empty phase vector");
    double re = 0.0;
    double im = 0.0;
    for (double t : phases) {
        re += std::cos(t);
        im += std::sin(t);
    }
    const double n = static_cast<double>(phases.size());
    re /= n;
    im /= n;
    OrderParameter out;
    out.r = std::min(1.0, std::hypot(re, im));
    out.psi = out.r < kIncoherentR ? 0.0 : wrap_phase(std::atan2(im, re));
    return out;
}

struct LocalOrder {
    double r = 0.0;
    bool degenerate = false;  // empty neighborhood
};

inline LocalOrder local_order_parameter(std::span<const double> phases,
                                        std::span<const std::size_t> neighborhood) {
    if (neighborhood.empty()) return {0.0, true};
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j : neighborhood) {
        if (j >= phases.size()) throw ArgumentError("local_order_parameter: index out of range");
        re += std::cos(phases[j]);
        im += std::sin(phases[j]);
    }
    const double n = static_cast<double>(neighborhood.size());
    return {std::min(1.0, std::hypot(re / n, im / n)), false};
}

/// dtheta/dt for every unit under the selected coupling variant.
/// j = i terms contribute sin(0) = 0 and are harmless.
inline Vector phase_drift(const OscillatorState& state, CouplingVariant variant,
                          const SparseGraph* graph = nullptr) {
    const std::size_t n = state.size();
    const auto& th = state.phases;
    const auto& om = state.frequencies;
    Vector drift(om.begin(), om.end());

    switch (variant) {
        case CouplingVariant::MeanFieldClassical: {
            const double scale = state.coupling / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += std::sin(th[j] - th[i]);
                drift[i] += scale * s;
            }
            break;
        }
        case CouplingVariant::OrderGatedKernel: {
            const double scale = state.coupling * order_parameter(th).r;
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    s += compatibility(om[i], om[j], state.kernel_bandwidth) * std::sin(th[j] - th[i]);
                }
                drift[i] += scale * s;
            }
            break;
        }
        case CouplingVariant::SparseLocal: {
            if (graph == nullptr) throw ArgumentError("phase_drift: SparseLocal requires a graph");
            require_same_size(graph->size(), n, "phase_drift (graph)");
            for (std::size_t i = 0; i < n; ++i) {
                const auto& nb = graph->neighbors(i);
                const double scale = state.coupling * local_order_parameter(th, nb).r;
                double s = 0.0;
                for (std::size_t j : nb) {
                    s += compatibility(om[i], om[j], state.kernel_bandwidth) * std::sin(th[j] - th[i]);
                }
                drift[i] += scale * s;
            }
            break;
        }
    }
    return drift;
}

// Applies theta <- wrap(theta + drift * dt) into a fresh buffer.
inline OscillatorState apply_drift(const OscillatorState& state, std::span<const double> drift, double dt) {
    require_same_size(state.size(), drift.size(), "apply_drift");
    OscillatorState next = state;
    for (std::size_t i = 0; i < next.size(); ++i) next.phases[i] = wrap_phase(state.phases[i] + drift[i] * dt);
    return next;
}

inline OscillatorState euler_phase_step(const OscillatorState& state, double dt, CouplingVariant variant,
                                        const SparseGraph* graph = nullptr) {
    if (!(dt > 0.0)) throw ArgumentError("euler_phase_step: dt must be > 0");
    return apply_drift(state, phase_drift(state, variant, graph), dt);
}

// max(0, K r C(w_i, w_j) - |w_i - w_j|)
inline double ssa_attention(double omega_i, double omega_j, double coupling, double r, double bandwidth) {
    if (!(coupling > 0.0)) throw ArgumentError("ssa_attention: K must be > 0");
    if (!(r >= 0.0 && r <= 1.0)) throw ArgumentError("ssa_attention: r must lie in [0, 1]");
    const double a = coupling * r * compatibility(omega_i, omega_j, bandwidth) - std::abs(omega_i - omega_j);
    return a > 0.0 ? a : 0.0;
}

/// A_ij = max(0, K r_{N_i} C(w_i, w_j) - |w_i - w_j|) for j in N_i, else 0.
/// Row i is aligned with graph.neighbors(i).
inline SparseRows local_attention_matrix(const OscillatorState& state, const SparseGraph& graph) {
    require_same_size(graph.size(), state.size(), "local_attention_matrix");
    SparseRows out;
    out.cols = graph.neighborhoods;
    out.values.resize(graph.size());
    for (std::size_t i = 0; i < graph.size(); ++i) {
        const auto& nb = graph.neighbors(i);
        const double r_local = local_order_parameter(state.phases, nb).r;
        auto& row = out.values[i];
        row.resize(nb.size());
        for (std::size_t p = 0; p < nb.size(); ++p) {
            row[p] = ssa_attention(state.frequencies[i], state.frequencies[nb[p]], state.coupling, r_local,
                                   state.kernel_bandwidth);
        }
    }
    return out;
}

}  // namespace hocl
