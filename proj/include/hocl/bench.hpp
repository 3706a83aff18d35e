#pragma once

// Per-step cost of the sparse pipeline versus population size at a fixed
// neighborhood cap. The naive O(n^2) graph build is timed on its own.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/geometry.hpp"
#include "hocl/graph.hpp"
#include "hocl/oscillator.hpp"
#include "hocl/plasticity.hpp"
#include "hocl/rng.hpp"

namespace hocl {

struct BenchOptions {
    std::vector<std::size_t> sizes{256, 512, 1024, 2048};
    std::size_t k_cap = 16;
    std::size_t reps = 5;
    std::size_t sync_steps = 5;
    std::size_t dim = 4;
    std::uint64_t seed = 1;
};

struct BenchPoint {
    std::size_t n = 0;
    double step_ns = 0.0;   // median per-step time
    double build_ns = 0.0;  // median graph construction time
    std::size_t entries = 0;
};

struct BenchResult {
    std::vector<BenchPoint> points;
    double exponent = 0.0;  // least-squares slope of log(step_ns) on log(n)
};

inline double median(std::vector<double> v) {
    if (v.empty()) throw ArgumentError("median: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require_same_size(x.size(), y.size(), "fit_loglog_slope");
    if (x.size() < 2) throw ArgumentError("fit_loglog_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace detail {

template <typename F>
double time_ns(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::nano>(t1 - t0).count();
}

}  // namespace detail

/// One forward/plasticity step over a fixed graph: T_sync sparse-local phase
/// steps, local attention, attention-weighted message passing and the
/// graph-restricted Hebbian update. Returns a checksum so nothing is elided.
inline double sparse_step(OscillatorState& state, WeightMatrix& w, const SparseGraph& g,
                          const std::vector<Vector>& features, const PlasticityParams& params,
                          std::size_t sync_steps, double dt) {
    for (std::size_t s = 0; s < sync_steps; ++s) state = euler_phase_step(state, dt, CouplingVariant::SparseLocal, &g);
    const SparseRows a = local_attention_matrix(state, g);
    const std::size_t n = state.size();
    const std::size_t d = features.front().size();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const auto& nb = g.neighbors(i);
        for (std::size_t p = 0; p < nb.size(); ++p) {
            const double c = a.values[i][p] * w(i, nb[p]);
            for (std::size_t k = 0; k < d; ++k) acc += c * features[nb[p]][k];
        }
        x[i] = std::tanh(acc);
    }
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) r += local_order_parameter(state.phases, g.neighbors(i)).r;
    r /= static_cast<double>(n);
    const HebbianStats hs = apply_hebbian(w, x, r, params, 1.0, &g);
    return hs.sum_abs_change + x[0];
}

inline BenchResult run_bench(const BenchOptions& o) {
    if (o.sizes.size() < 2) throw ArgumentError("bench: need at least two sizes");
    if (!std::is_sorted(o.sizes.begin(), o.sizes.end())) throw ArgumentError("bench: sizes must be ascending");
    if (o.k_cap == 0) throw ArgumentError("bench: k must be >= 1");
    if (o.reps == 0) throw ArgumentError("bench: reps must be >= 1");

    BenchResult result;
    volatile double sink = 0.0;
    for (std::size_t n : o.sizes) {
        if (n < o.k_cap) throw ArgumentError("bench: every n must be >= k");
        Rng rng = seeded_rng(o.seed ^ n);
        std::vector<PoincarePoint> z;
        std::vector<Vector> features(n, Vector(o.dim));
        for (std::size_t i = 0; i < n; ++i) {
            Vector v(o.dim);
            for (double& c : v) c = rng.normal(0.0, 0.5);
            z.push_back(project_to_ball(std::move(v)));
            for (double& f : features[i]) f = rng.normal();
        }
        Vector theta(n), omega(n);
        for (double& t : theta) t = rng.uniform(0.0, kTwoPi);
        for (double& w : omega) w = rng.normal(0.0, 0.5);
        center_frequencies(omega);
        const OscillatorState init = make_oscillator_state(theta, omega, 2.0, 1.0);
        PlasticityParams params;

        BenchPoint pt;
        pt.n = n;
        std::vector<double> builds, steps;
        SparseGraph g;
        // rep 0 is warmup and is discarded
        for (std::size_t rep = 0; rep <= o.reps; ++rep) {
            const double b = detail::time_ns([&] { g = build_graph(z, 1e300, o.k_cap); });
            OscillatorState state = init;
            WeightMatrix w(n);
            const double s = detail::time_ns([&] { sink = sink + sparse_step(state, w, g, features, params, o.sync_steps, 0.05); });
            if (rep > 0) {
                builds.push_back(b);
                steps.push_back(s);
            }
        }
        pt.build_ns = median(builds);
        pt.step_ns = median(steps);
        pt.entries = g.entry_count();
        result.points.push_back(pt);
    }
    std::vector<double> xs, ys;
    for (const auto& p : result.points) {
        xs.push_back(static_cast<double>(p.n));
        ys.push_back(p.step_ns);
    }
    result.exponent = fit_loglog_slope(xs, ys);
    return result;
}

}  // namespace hocl
