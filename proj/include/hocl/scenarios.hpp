#pragma once

// Seeded reproductions of the three coupled Kuramoto-Hebbian simulations
// (two-timescale dynamics, synchronization/plasticity coupling, Lyapunov
// basin) plus the analyses used to check them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/graph.hpp"
#include "hocl/linalg.hpp"
#include "hocl/oscillator.hpp"
#include "hocl/parallel.hpp"
#include "hocl/plasticity.hpp"
#include "hocl/rng.hpp"
#include "hocl/stability.hpp"

namespace hocl {

enum class ScenarioId { Fig2Timescale, Fig3Coupling, Fig4Basin, ToyTraining };

inline const char* scenario_name(ScenarioId id) noexcept {
    switch (id) {
        case ScenarioId::Fig2Timescale: return "fig2";
        case ScenarioId::Fig3Coupling: return "fig3";
        case ScenarioId::Fig4Basin: return "fig4";
        case ScenarioId::ToyTraining: return "train";
    }
    return "?";
}

inline std::optional<ScenarioId> parse_scenario(const std::string& name) {
    if (name == "fig2") return ScenarioId::Fig2Timescale;
    if (name == "fig3") return ScenarioId::Fig3Coupling;
    if (name == "fig4") return ScenarioId::Fig4Basin;
    if (name == "train") return ScenarioId::ToyTraining;
    return std::nullopt;
}

// Normal: omega ~ N(mean, stddev^2) for all units.
// TwoCluster: first `count` units from (mean, stddev), next `count2` from (mean2, stddev2).
struct FrequencySpec {
    enum class Kind { Normal, TwoCluster };
    Kind kind = Kind::Normal;
    double mean = 0.0;
    double stddev = 1.0;
    std::size_t count = 0;
    double mean2 = 0.0;
    double stddev2 = 0.0;
    std::size_t count2 = 0;
};

enum class ActivationModel {
    SparseGaussian,  // x_i = mask_i * N(0, s^2), mask ~ Bernoulli(density), clipped to [-M, M]
    PhaseCosine,     // x_i = clip(cos(theta_i)/2 + 1/2 + N(0, s^2), 0, 1)
};

struct ScenarioConfig {
    ScenarioId id = ScenarioId::Fig2Timescale;
    std::size_t n = 50;
    double dt = 0.05;
    std::size_t steps = 1000;
    double coupling = 2.0;
    double kernel_bandwidth = 1.0;
    CouplingVariant variant = CouplingVariant::MeanFieldClassical;
    FrequencySpec frequencies;
    bool centered = true;
    PlasticityParams plasticity;
    double lyapunov_weight = 0.3;
    ActivationModel activations = ActivationModel::SparseGaussian;
    double activation_density = 0.3;
    double activation_stddev = 0.5;
    double initial_weight_stddev = 0.01;
    std::size_t trajectories = 1;
    std::size_t average_window = 25;
    double cluster_cut = std::numbers::pi / 4.0;
    std::size_t burn_in = 100;
    std::uint64_t seed = 42;

    void validate() const {
        if (n == 0) throw ArgumentError("ScenarioConfig: n must be >= 1");
        if (steps == 0) throw ArgumentError("ScenarioConfig: steps must be >= 1");
        if (!(dt > 0.0)) throw ArgumentError("ScenarioConfig: dt must be > 0");
        if (!(coupling > 0.0)) throw ArgumentError("ScenarioConfig: K must be > 0");
        if (!(kernel_bandwidth > 0.0)) throw ArgumentError("ScenarioConfig: sigma_C must be > 0");
        if (!(lyapunov_weight > 0.0)) throw ArgumentError("ScenarioConfig: lambda must be > 0");
        if (frequencies.kind == FrequencySpec::Kind::TwoCluster && frequencies.count + frequencies.count2 != n) {
            throw ArgumentError("ScenarioConfig: frequency cluster sizes must sum to n");
        }
        if (!(activation_density >= 0.0 && activation_density <= 1.0)) {
            throw ArgumentError("ScenarioConfig: activation density must be in [0, 1]");
        }
        if (trajectories == 0) throw ArgumentError("ScenarioConfig: trajectories must be >= 1");
        if (average_window == 0) throw ArgumentError("ScenarioConfig: average window must be >= 1");
        if (!(cluster_cut > 0.0 && cluster_cut <= std::numbers::pi)) {
            throw ArgumentError("ScenarioConfig: cluster cut must be in (0, pi]");
        }
        plasticity.validate();
    }
};

/// Named presets. Distribution parameters are standard deviations; the
/// simulation write-up quotes variances (N(0, 0.25) -> stddev 0.5, etc.).
inline ScenarioConfig scenario_preset(ScenarioId id) {
    ScenarioConfig c;
    c.id = id;
    switch (id) {
        case ScenarioId::Fig2Timescale:
        case ScenarioId::ToyTraining:
            c.n = 50;
            c.dt = 0.05;
            c.steps = 1000;
            c.coupling = 2.0;
            c.frequencies = {FrequencySpec::Kind::Normal, 0.0, 1.0};
            c.plasticity = {0.01, 0.001, 0.5, 20.0, GateMode::Smooth, 2.0, false};
            c.activations = ActivationModel::SparseGaussian;
            c.activation_density = 0.3;
            c.activation_stddev = 0.5;
            c.initial_weight_stddev = 0.01;
            c.seed = 42;
            break;
        case ScenarioId::Fig3Coupling:
            c.n = 8;
            c.dt = 0.02;
            c.steps = 2000;
            c.coupling = 3.0;
            c.frequencies = {FrequencySpec::Kind::TwoCluster, 0.0, 0.3, 5, 3.0, 0.3, 3};
            c.plasticity = {0.02, 0.002, 0.5, 20.0, GateMode::Smooth, 1.0, false};
            c.activations = ActivationModel::PhaseCosine;
            c.activation_stddev = 0.05;
            c.initial_weight_stddev = 0.0;
            c.seed = 123;
            break;
        case ScenarioId::Fig4Basin:
            c.n = 20;
            c.dt = 0.02;
            c.steps = 600;
            c.coupling = 2.0;
            c.frequencies = {FrequencySpec::Kind::Normal, 0.0, 0.5};
            c.plasticity = {0.01, 0.001, 0.5, 15.0, GateMode::Smooth, 2.0, false};
            c.activations = ActivationModel::SparseGaussian;
            c.activation_density = 0.3;
            c.activation_stddev = 0.5;
            c.initial_weight_stddev = 0.1;
            c.trajectories = 8;
            c.seed = 42;
            break;
    }
    return c;
}

struct TraceRow {
    std::size_t t = 0;
    double r = 0.0;                // order parameter the step was gated on
    double gate = 0.0;             // G(r)
    double mean_abs_dtheta = 0.0;  // mean_i |dtheta_i/dt|
    double mean_abs_dw = 0.0;      // mean over updated pairs |Delta W_ij|
    double frob_w = 0.0;           // |W|_F after the step
    double v_theta = 0.0;          // after the step
    double v_w = 0.0;
    double v_total = 0.0;
};

struct SimulationTrace {
    std::vector<TraceRow> rows;
    Vector final_phases;
    Vector frequencies;
    WeightMatrix final_weights;
    std::vector<std::vector<std::size_t>> clusters;  // 0-based, empty unless computed
};

inline Vector sample_frequencies(const ScenarioConfig& c, Rng& rng) {
    Vector omega(c.n);
    const auto& f = c.frequencies;
    for (std::size_t i = 0; i < c.n; ++i) {
        const bool second = f.kind == FrequencySpec::Kind::TwoCluster && i >= f.count;
        omega[i] = second ? rng.normal(f.mean2, f.stddev2) : rng.normal(f.mean, f.stddev);
    }
    if (c.centered) center_frequencies(omega);
    return omega;
}

inline Vector sample_uniform_phases(std::size_t n, Rng& rng) {
    Vector theta(n);
    for (double& t : theta) t = wrap_phase(rng.uniform(0.0, kTwoPi));
    return theta;
}

// A_ij ~ N(0, s^2) for all i, j (row-major); W = (A + A^T) / 2 with zero diagonal.
inline WeightMatrix sample_symmetric_weights(std::size_t n, double stddev, Rng& rng) {
    WeightMatrix w(n);
    if (stddev == 0.0) return w;
    Matrix a(n, n);
    for (double& v : a.data()) v = rng.normal(0.0, stddev);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) w.set_symmetric(i, j, 0.5 * (a(i, j) + a(j, i)));
    }
    return w;
}

// Each unit consumes the same number of draws regardless of outcome, so the
// stream stays aligned across configurations.
inline Vector sample_activations(const ScenarioConfig& c, std::span<const double> phases, Rng& rng) {
    Vector x(c.n);
    const double bound = c.plasticity.activation_bound;
    for (std::size_t i = 0; i < c.n; ++i) {
        if (c.activations == ActivationModel::SparseGaussian) {
            const double u = rng.uniform();
            const double v = rng.normal(0.0, c.activation_stddev);
            x[i] = u < c.activation_density ? std::clamp(v, -bound, bound) : 0.0;
        } else {
            const double eps = rng.normal(0.0, c.activation_stddev);
            x[i] = std::clamp(0.5 * std::cos(phases[i]) + 0.5 + eps, 0.0, 1.0);
        }
    }
    return x;
}

struct InitialCondition {
    Vector phases;
    WeightMatrix weights;
};

// Per-step observer: called with the post-step state.
struct NullObserver {
    void operator()(const OscillatorState&, const WeightMatrix&) const noexcept {}
};

/// Forward-Euler integration of the coupled system. Per step t:
///   r, G from theta^(t); x^(t) sampled; W^(t+1) from the Hebbian rule (step 1,
///   all pairs); theta^(t+1) from the phase drift at theta^(t).
template <typename Observer = NullObserver>
SimulationTrace simulate_coupled(const ScenarioConfig& c, const Vector& frequencies, InitialCondition init,
                                 Rng& rng, Observer&& observe = {}) {
    OscillatorState state =
        make_oscillator_state(std::move(init.phases), frequencies, c.coupling, c.kernel_bandwidth);
    WeightMatrix w = std::move(init.weights);
    require_same_size(state.size(), w.size(), "simulate_coupled");

    std::optional<SparseGraph> graph;
    if (c.variant == CouplingVariant::SparseLocal) graph = SparseGraph::complete(c.n);

    SimulationTrace trace;
    trace.rows.reserve(c.steps);
    for (std::size_t t = 0; t < c.steps; ++t) {
        const OrderParameter op = order_parameter(state.phases);
        const Vector x = sample_activations(c, state.phases, rng);
        const HebbianStats hs = apply_hebbian(w, x, op.r, c.plasticity, 1.0, nullptr);

        const Vector drift = phase_drift(state, c.variant, graph ? &*graph : nullptr);
        state = apply_drift(state, drift, c.dt);

        double abs_drift = 0.0;
        for (double d : drift) abs_drift += std::abs(d);

        const LyapunovValue v = lyapunov(state, w, c.lyapunov_weight);
        TraceRow row{t, op.r, hs.gate, abs_drift / static_cast<double>(c.n), hs.mean_abs_change(),
                     w.frobenius_norm(), v.oscillatory, v.structural, v.total};
        if (!std::isfinite(row.mean_abs_dtheta) || !std::isfinite(row.frob_w) || !std::isfinite(row.v_total)) {
            throw NumericalError("simulate_coupled: non-finite state at step " + std::to_string(t));
        }
        trace.rows.push_back(row);
        observe(state, w);
    }
    trace.final_phases = state.phases;
    trace.frequencies = state.frequencies;
    trace.final_weights = std::move(w);
    return trace;
}

// Stream order: frequencies, initial phases, initial weights, then per step activations.
inline SimulationTrace run_single(const ScenarioConfig& c) {
    c.validate();
    Rng rng = seeded_rng(c.seed);
    const Vector omega = sample_frequencies(c, rng);
    InitialCondition init;
    init.phases = sample_uniform_phases(c.n, rng);
    init.weights = sample_symmetric_weights(c.n, c.initial_weight_stddev, rng);
    return simulate_coupled(c, omega, std::move(init), rng);
}

// ---------------------------------------------------------------------------
// Clustering

inline double circular_distance(double a, double b) noexcept { return std::abs(wrap_signed(a - b)); }

/// Complete-linkage agglomerative clustering under circular distance.
/// Merges the closest pair while its linkage is < cut; ties go to the pair
/// with the lowest (first, second) cluster indices, clusters being ordered by
/// their smallest member. Returns sorted 0-based clusters ordered by first member.
inline std::vector<std::vector<std::size_t>> detect_clusters(std::span<const double> phases, double cut) {
    if (!(cut > 0.0 && cut <= std::numbers::pi)) throw ArgumentError("detect_clusters: cut must be in (0, pi]");
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < phases.size(); ++i) clusters.push_back({i});

    auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        double worst = 0.0;
        for (std::size_t i : a) {
            for (std::size_t j : b) worst = std::max(worst, circular_distance(phases[i], phases[j]));
        }
        return worst;
    };

    while (clusters.size() > 1) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t ba = 0;
        std::size_t bb = 0;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double l = linkage(clusters[a], clusters[b]);
                if (l < best) {
                    best = l;
                    ba = a;
                    bb = b;
                }
            }
        }
        if (!(best < cut)) break;
        auto& target = clusters[ba];
        target.insert(target.end(), clusters[bb].begin(), clusters[bb].end());
        std::sort(target.begin(), target.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
    }
    return clusters;
}

// ---------------------------------------------------------------------------
// Scenario runners

inline SimulationTrace run_fig2(const ScenarioConfig& c) { return run_single(c); }

inline SimulationTrace run_fig3(const ScenarioConfig& c) {
    SimulationTrace trace = run_single(c);
    trace.clusters = detect_clusters(trace.final_phases, c.cluster_cut);
    return trace;
}

// Mean over units of |wrap(theta_i - psi)|, psi the ensemble mean phase.
inline double mean_phase_deviation(std::span<const double> phases) {
    const OrderParameter op = order_parameter(phases);
    double s = 0.0;
    for (double t : phases) s += std::abs(wrap_signed(t - op.psi));
    return s / static_cast<double>(phases.size());
}

struct ProjectedPoint {
    double w = 0.0;        // |W|_F / N
    double phi_bar = 0.0;  // mean phase deviation
    double v = 0.0;        // projected Lyapunov value
};

struct SurfaceGrid {
    Vector w_axis;
    Vector phi_axis;
    Matrix values;  // values(i, j) at (w_axis[i], phi_axis[j])

    struct Minimum {
        double w;
        double phi;
        double value;
    };

    Minimum minimum() const {
        Minimum m{0.0, 0.0, std::numeric_limits<double>::infinity()};
        for (std::size_t i = 0; i < w_axis.size(); ++i) {
            for (std::size_t j = 0; j < phi_axis.size(); ++j) {
                if (values(i, j) < m.value) m = {w_axis[i], phi_axis[j], values(i, j)};
            }
        }
        return m;
    }
};

// Grid over w in [0, w_max] and phi in [-pi/2, pi/2]; both axes include 0.
inline SurfaceGrid lyapunov_surface(double coupling, double weight, double w_max = 2.0, std::size_t w_points = 41,
                                    std::size_t phi_points = 41) {
    if (w_points < 2 || phi_points < 3 || phi_points % 2 == 0) {
        throw ArgumentError("lyapunov_surface: need >= 2 w points and an odd count >= 3 of phi points");
    }
    SurfaceGrid g;
    g.w_axis.resize(w_points);
    g.phi_axis.resize(phi_points);
    for (std::size_t i = 0; i < w_points; ++i) g.w_axis[i] = w_max * static_cast<double>(i) / static_cast<double>(w_points - 1);
    const std::size_t mid = phi_points / 2;
    for (std::size_t j = 0; j < phi_points; ++j) {
        const double k = static_cast<double>(j) - static_cast<double>(mid);
        g.phi_axis[j] = (std::numbers::pi / 2.0) * k / static_cast<double>(mid);
    }
    g.values = Matrix(w_points, phi_points);
    for (std::size_t i = 0; i < w_points; ++i) {
        for (std::size_t j = 0; j < phi_points; ++j) {
            g.values(i, j) = projected_lyapunov(g.w_axis[i], g.phi_axis[j], coupling, weight);
        }
    }
    return g;
}

struct BasinResult {
    std::vector<SimulationTrace> trajectories;
    std::vector<std::vector<ProjectedPoint>> projections;
    SurfaceGrid surface;
};

/// Frequencies come from the master stream; trajectory k draws its initial
/// phases, weights and activations from rng.split(k). Trajectories run in
/// parallel (HOCL_THREADS) with identical results to a serial run.
inline BasinResult run_fig4(const ScenarioConfig& c) {
    c.validate();
    Rng master = seeded_rng(c.seed);
    const Vector omega = sample_frequencies(c, master);

    BasinResult out;
    out.trajectories.resize(c.trajectories);
    out.projections.resize(c.trajectories);
    parallel_jobs(c.trajectories, [&](std::size_t k) {
        Rng rng = master.split(k);
        InitialCondition init;
        init.phases = sample_uniform_phases(c.n, rng);
        init.weights = sample_symmetric_weights(c.n, c.initial_weight_stddev, rng);
        auto& proj = out.projections[k];
        proj.reserve(c.steps);
        const double n = static_cast<double>(c.n);
        out.trajectories[k] = simulate_coupled(c, omega, std::move(init), rng,
                                               [&](const OscillatorState& s, const WeightMatrix& w) {
                                                   ProjectedPoint p;
                                                   p.w = w.frobenius_norm() / n;
                                                   p.phi_bar = mean_phase_deviation(s.phases);
                                                   p.v = projected_lyapunov(p.w, p.phi_bar, c.coupling,
                                                                            c.lyapunov_weight);
                                                   proj.push_back(p);
                                               });
    });
    out.surface = lyapunov_surface(c.coupling, c.lyapunov_weight);
    return out;
}

// ---------------------------------------------------------------------------
// Trace analysis

// First step at which r > r_c.
inline std::optional<std::size_t> gate_opening_step(const SimulationTrace& trace, double critical_r) {
    for (const auto& row : trace.rows) {
        if (row.r > critical_r) return row.t;
    }
    return std::nullopt;
}

struct PlasticityContrast {
    double before = 0.0;  // mean of mean_abs_dw over steps < opening
    double after = 0.0;   // over steps >= opening
    double ratio() const noexcept { return before > 0.0 ? after / before : std::numeric_limits<double>::infinity(); }
};

inline PlasticityContrast plasticity_contrast(const SimulationTrace& trace, std::size_t opening) {
    PlasticityContrast pc;
    std::size_t nb = 0;
    std::size_t na = 0;
    for (const auto& row : trace.rows) {
        if (row.t < opening) {
            pc.before += row.mean_abs_dw;
            ++nb;
        } else {
            pc.after += row.mean_abs_dw;
            ++na;
        }
    }
    if (nb) pc.before /= static_cast<double>(nb);
    if (na) pc.after /= static_cast<double>(na);
    return pc;
}

// Trailing running mean; the first window-1 entries average what is available.
inline Vector running_average(std::span<const double> x, std::size_t window) {
    if (window == 0) throw ArgumentError("running_average: window must be >= 1");
    Vector out(x.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc += x[i];
        if (i >= window) acc -= x[i - window];
        out[i] = acc / static_cast<double>(std::min(i + 1, window));
    }
    return out;
}

// Fraction of consecutive samples at which (x - mean x) changes sign.
inline double zero_crossing_rate(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    std::size_t crossings = 0;
    int prev = 0;
    for (double v : x) {
        const int s = v > mean ? 1 : (v < mean ? -1 : 0);
        if (s != 0) {
            if (prev != 0 && s != prev) ++crossings;
            prev = s;
        }
    }
    return static_cast<double>(crossings) / static_cast<double>(x.size() - 1);
}

struct TimescaleSeparation {
    double fast_rate = 0.0;  // zero-crossing rate of the smoothed phase-speed series
    double slow_rate = 0.0;  // same for the smoothed weight-change series
    double ratio() const noexcept {
        return slow_rate > 0.0 ? fast_rate / slow_rate : std::numeric_limits<double>::infinity();
    }
};

/// Zero-crossing rates of the window-smoothed mean|dtheta/dt| and mean|dW|
/// series after the gate opens, as a proxy for their dominant frequencies.
inline TimescaleSeparation timescale_separation(const SimulationTrace& trace, std::size_t opening,
                                                std::size_t window) {
    Vector fast;
    Vector slow;
    for (const auto& row : trace.rows) {
        fast.push_back(row.mean_abs_dtheta);
        slow.push_back(row.mean_abs_dw);
    }
    const Vector fs = running_average(fast, window);
    const Vector ss = running_average(slow, window);
    const auto begin = std::min(opening, fs.size());
    TimescaleSeparation out;
    out.fast_rate = zero_crossing_rate(std::span<const double>(fs).subspan(begin));
    out.slow_rate = zero_crossing_rate(std::span<const double>(ss).subspan(begin));
    return out;
}

struct BlockStructure {
    double within = 0.0;  // mean W_ij, i != j, both in the first block
    double cross = 0.0;   // mean W_ij, i in the first block, j outside
    double ratio() const noexcept { return cross != 0.0 ? within / cross : std::numeric_limits<double>::infinity(); }
};

inline BlockStructure block_structure(const WeightMatrix& w, std::size_t first_block) {
    if (first_block < 2 || first_block >= w.size()) throw ArgumentError("block_structure: bad block size");
    BlockStructure b;
    std::size_t nw = 0;
    std::size_t nc = 0;
    for (std::size_t i = 0; i < first_block; ++i) {
        for (std::size_t j = 0; j < w.size(); ++j) {
            if (j == i) continue;
            if (j < first_block) {
                b.within += w(i, j);
                ++nw;
            } else {
                b.cross += w(i, j);
                ++nc;
            }
        }
    }
    b.within /= static_cast<double>(nw);
    b.cross /= static_cast<double>(nc);
    return b;
}

// Largest |W|_F over the trace (rows are post-step, so step 0 onward).
inline double max_weight_norm(const SimulationTrace& trace) {
    double m = 0.0;
    for (const auto& row : trace.rows) m = std::max(m, row.frob_w);
    return m;
}

// Largest single-step increase of `values` from index `from` on.
inline double max_increase(std::span<const double> values, std::size_t from) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = std::max<std::size_t>(from, 1); i < values.size(); ++i) {
        worst = std::max(worst, values[i] - values[i - 1]);
    }
    return worst;
}

}  // namespace hocl
