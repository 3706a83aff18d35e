#pragma once

// Lyapunov functions, analytic bounds and timescale diagnostics.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

#include "hocl/error.hpp"
#include "hocl/oscillator.hpp"
#include "hocl/plasticity.hpp"

namespace hocl {

struct LyapunovValue {
    double total = 0.0;
    double oscillatory = 0.0;  // V_theta
    double structural = 0.0;   // V_W
    double weight = 0.0;       // lambda
};

/// V_theta = -(K / 2N) sum_{i,j} cos(theta_i - theta_j), all ordered pairs
/// including i = j. Evaluated through |sum_j e^{i theta_j}|^2, which equals
/// the double sum exactly; O(N).
inline double oscillatory_energy(std::span<const double> phases, double coupling) {
    if (phases.empty()) throw ArgumentError("oscillatory_energy: empty phase vector");
    double re = 0.0;
    double im = 0.0;
    for (double t : phases) {
        re += std::cos(t);
        im += std::sin(t);
    }
    const double n = static_cast<double>(phases.size());
    return -coupling / (2.0 * n) * (re * re + im * im);
}

// dV_theta / dtheta_i = (K / N) sum_j sin(theta_i - theta_j)
inline Vector oscillatory_energy_gradient(std::span<const double> phases, double coupling) {
    const std::size_t n = phases.size();
    if (n == 0) throw ArgumentError("oscillatory_energy_gradient: empty phase vector");
    Vector g(n, 0.0);
    const double scale = coupling / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::sin(phases[i] - phases[j]);
        g[i] = scale * s;
    }
    return g;
}

inline LyapunovValue lyapunov(const OscillatorState& state, const WeightMatrix& w, double weight) {
    require_same_size(state.size(), w.size(), "lyapunov");
    if (!(weight > 0.0)) throw ArgumentError("lyapunov: lambda must be > 0");
    LyapunovValue v;
    v.weight = weight;
    v.oscillatory = oscillatory_energy(state.phases, state.coupling);
    v.structural = 0.5 * weight * w.squared_frobenius();
    v.total = v.oscillatory + v.structural;
    return v;
}

// Mean-field projection onto (w = |W|_F / N, mean phase deviation):
//   V(w, phi) = -(K/2) cos^2(phi) + (lambda/2) w^2
inline double projected_lyapunov(double w, double phi, double coupling, double weight) noexcept {
    const double c = std::cos(phi);
    return -0.5 * coupling * c * c + 0.5 * weight * w * w;
}

// L_C = 1 / (sigma_C^2 sqrt(e)) as stated for the Gaussian kernel. The true
// max slope is 1 / (sigma_C sqrt(e)); the two agree at sigma_C = 1 and this
// value is a valid Lipschitz bound only for sigma_C <= 1.
inline double kernel_lipschitz(double bandwidth) {
    if (!(bandwidth > 0.0)) throw ArgumentError("kernel_lipschitz: sigma_C must be > 0");
    return 1.0 / (bandwidth * bandwidth * std::sqrt(std::numbers::e));
}

// Upper limit on alpha_slow / alpha_fast: eps / (L_C K N + eta M^2)
inline double separation_bound(double eps, double lipschitz, double coupling, std::size_t n, double eta,
                               double activation_bound) {
    if (!(eps > 0.0) || !(lipschitz > 0.0) || !(coupling > 0.0) || n == 0 || !(eta >= 0.0) ||
        !(activation_bound > 0.0)) {
        throw ArgumentError("separation_bound: parameters must be positive");
    }
    return eps / (lipschitz * coupling * static_cast<double>(n) + eta * activation_bound * activation_bound);
}

struct LearningRates {
    double fast = 0.0;
    double slow = 0.0;
};

// alpha_fast = a / (t+1)^p, alpha_slow = b / (t+1)^q with 1/2 < p < q <= 1.
inline LearningRates lr_schedule(std::size_t t, double a, double b, double p, double q) {
    if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("lr_schedule: a and b must be > 0");
    if (!(p > 0.5 && p < q && q <= 1.0)) throw ArgumentError("lr_schedule: need 1/2 < p < q <= 1");
    const double base = static_cast<double>(t) + 1.0;
    return {a / std::pow(base, p), b / std::pow(base, q)};
}

// C_min = min_{i,j} C(w_i, w_j): reported as a diagnostic only.
inline double min_compatibility(std::span<const double> frequencies, double bandwidth) {
    if (frequencies.empty()) throw ArgumentError("min_compatibility: empty frequency set");
    double lo = frequencies[0];
    double hi = frequencies[0];
    for (double w : frequencies) {
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return compatibility(lo, hi, bandwidth);
}

}  // namespace hocl
