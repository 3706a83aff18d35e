#pragma once

// The co-learning model at toy scale: forward pass over a sparse hyperbolic
// graph with oscillatory attention, and the iterative training procedure
// (fast task-gradient step, gated Hebbian slow step, Riemannian embedding
// update, Lyapunov convergence check).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hocl/error.hpp"
#include "hocl/geometry.hpp"
#include "hocl/graph.hpp"
#include "hocl/linalg.hpp"
#include "hocl/oscillator.hpp"
#include "hocl/plasticity.hpp"
#include "hocl/rng.hpp"
#include "hocl/stability.hpp"

namespace hocl {

enum class Nonlinearity { ReLU, Identity };

inline double activate(Nonlinearity f, double v) noexcept {
    return f == Nonlinearity::ReLU ? std::max(0.0, v) : v;
}

struct HoclModel {
    std::vector<PoincarePoint> embeddings;  // unit anchors z_i
    Matrix projection;                      // P, d x d_in
    Matrix readout;                         // per-unit output weights, N x d_in
    OscillatorState oscillator;
    WeightMatrix weights;
    PlasticityParams plasticity;
    double delta = 1.0;
    std::optional<std::size_t> k_cap;
    std::size_t sync_steps = 10;  // T_sync
    double dt = 0.05;
    double alpha_fast = 0.05;
    double alpha_slow = 2e-5;
    double alpha_embed = 0.05;
    double lyapunov_weight = 0.3;
    Nonlinearity nonlinearity = Nonlinearity::ReLU;
    double fd_step = 1e-5;

    std::size_t units() const noexcept { return embeddings.size(); }
    std::size_t dim() const noexcept { return projection.rows(); }
    std::size_t input_dim() const noexcept { return projection.cols(); }

    void validate() const {
        const std::size_t n = units();
        if (n == 0) throw ArgumentError("HoclModel: no units");
        for (const auto& z : embeddings) require_same_size(dim(), z.dim(), "HoclModel (embedding dim)");
        require_same_size(readout.rows(), n, "HoclModel (readout rows)");
        require_same_size(readout.cols(), input_dim(), "HoclModel (readout cols)");
        require_same_size(oscillator.size(), n, "HoclModel (oscillators)");
        require_same_size(weights.size(), n, "HoclModel (weights)");
        oscillator.validate();
        plasticity.validate();
        if (!(delta > 0.0)) throw ArgumentError("HoclModel: delta must be > 0");
        if (sync_steps < 1) throw ArgumentError("HoclModel: T_sync must be >= 1");
        if (!(dt > 0.0)) throw ArgumentError("HoclModel: dt must be > 0");
        if (alpha_fast < 0.0 || alpha_slow < 0.0 || alpha_embed < 0.0) {
            throw ArgumentError("HoclModel: learning rates must be >= 0");
        }
        if (!(lyapunov_weight > 0.0)) throw ArgumentError("HoclModel: lambda must be > 0");
        if (!(fd_step > 0.0)) throw ArgumentError("HoclModel: finite-difference step must be > 0");
    }
};

// One fixed batch: row i of `inputs` feeds unit i; targets[i] is its regression target.
struct Dataset {
    Matrix inputs;
    Vector targets;
};

struct ForwardResult {
    std::vector<PoincarePoint> positions;  // exp_{z_i}(P x_i)
    SparseGraph graph;
    Vector phases;  // after T_sync steps
    SparseRows attention;
    std::vector<Vector> hidden;
    Vector outputs;  // readout_i . h_i
    double r = 0.0;  // global order parameter of the synchronized phases
    std::optional<double> loss;
};

inline double squared_error_loss(std::span<const double> outputs, std::span<const double> targets) {
    require_same_size(outputs.size(), targets.size(), "squared_error_loss");
    double s = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const double e = outputs[i] - targets[i];
        s += e * e;
    }
    return s / static_cast<double>(outputs.size());
}

/// Forward pass:
///   1. position units at exp_{z_i}(P x_i) (exp_0(P x_i) for anchors at the origin)
///   2. threshold graph on hyperbolic distance
///   3. T_sync sparse-local Euler phase steps, then local attention
///   4. h_i = act( sum_{j in N_i} A_ij W_ij x_j )
///   5. global r of the synchronized phases
/// Pure function of (model, inputs).
inline ForwardResult forward(const HoclModel& model, const Matrix& inputs, const Vector* targets = nullptr) {
    const std::size_t n = model.units();
    require_same_size(inputs.rows(), n, "forward (input count)");
    require_same_size(inputs.cols(), model.input_dim(), "forward (input dim)");

    ForwardResult out;
    out.positions.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.positions.push_back(embed_at(model.embeddings[i], inputs.row(i), model.projection));
    }
    out.graph = build_graph(out.positions, model.delta, model.k_cap);

    OscillatorState state = model.oscillator;
    for (std::size_t s = 0; s < model.sync_steps; ++s) {
        state = euler_phase_step(state, model.dt, CouplingVariant::SparseLocal, &out.graph);
    }
    out.attention = local_attention_matrix(state, out.graph);

    const std::size_t d = model.input_dim();
    out.hidden.assign(n, Vector(d, 0.0));
    out.outputs.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Vector acc(d, 0.0);
        const auto& nb = out.graph.neighbors(i);
        for (std::size_t p = 0; p < nb.size(); ++p) {
            const std::size_t j = nb[p];
            const double coeff = out.attention.values[i][p] * model.weights(i, j);
            if (coeff == 0.0) continue;
            const auto xj = inputs.row(j);
            for (std::size_t k = 0; k < d; ++k) acc[k] += coeff * xj[k];
        }
        for (std::size_t k = 0; k < d; ++k) out.hidden[i][k] = activate(model.nonlinearity, acc[k]);
        out.outputs[i] = dot(model.readout.row(i), out.hidden[i]);
    }
    out.r = order_parameter(state.phases).r;
    out.phases = std::move(state.phases);
    if (targets) out.loss = squared_error_loss(out.outputs, *targets);
    return out;
}

inline double forward_loss(const HoclModel& model, const Dataset& data) {
    return *forward(model, data.inputs, &data.targets).loss;
}

// Bounded unit activations fed to the Hebbian rule (|x_i| <= 1).
inline Vector hebbian_activations(const ForwardResult& fr) {
    Vector x(fr.outputs.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::tanh(fr.outputs[i]);
    return x;
}

// Central difference of the loss w.r.t. one scalar reached through `slot`.
template <typename Slot>
double central_difference(HoclModel& probe, const Dataset& data, double h, Slot&& slot) {
    double& v = slot(probe);
    const double saved = v;
    v = saved + h;
    const double up = forward_loss(probe, data);
    v = saved - h;
    const double down = forward_loss(probe, data);
    v = saved;
    return (up - down) / (2.0 * h);
}

struct TaskGradients {
    Matrix projection;
    Matrix readout;
    std::vector<Vector> embeddings;  // Euclidean, in ball coordinates
};

/// Finite-difference gradients of the loss for P, the readout and every
/// embedding coordinate, all at the same model state.
inline TaskGradients task_gradients(const HoclModel& model, const Dataset& data, double h) {
    TaskGradients g{Matrix(model.dim(), model.input_dim()), Matrix(model.units(), model.input_dim()), {}};
    HoclModel probe = model;
    for (std::size_t r = 0; r < model.dim(); ++r) {
        for (std::size_t c = 0; c < model.input_dim(); ++c) {
            g.projection(r, c) = central_difference(probe, data, h, [&](HoclModel& m) -> double& {
                return m.projection(r, c);
            });
        }
    }
    for (std::size_t r = 0; r < model.units(); ++r) {
        for (std::size_t c = 0; c < model.input_dim(); ++c) {
            g.readout(r, c) = central_difference(probe, data, h, [&](HoclModel& m) -> double& {
                return m.readout(r, c);
            });
        }
    }
    g.embeddings.assign(model.units(), Vector(model.dim(), 0.0));
    for (std::size_t i = 0; i < model.units(); ++i) {
        for (std::size_t k = 0; k < model.dim(); ++k) {
            Vector up(model.embeddings[i].coords().begin(), model.embeddings[i].coords().end());
            Vector down = up;
            up[k] += h;
            down[k] -= h;
            probe.embeddings[i] = project_to_ball(up);
            const double lu = forward_loss(probe, data);
            probe.embeddings[i] = project_to_ball(down);
            const double ld = forward_loss(probe, data);
            probe.embeddings[i] = model.embeddings[i];
            g.embeddings[i][k] = (lu - ld) / (2.0 * h);
        }
    }
    return g;
}

struct StepMetrics {
    std::size_t iteration = 0;
    double loss = 0.0;        // at the start of the iteration
    double r = 0.0;           // global order parameter computed this iteration
    double hebbian_r = 0.0;   // r the Hebbian update was gated on
    double gate = 0.0;
    double mean_abs_dw = 0.0;
    double frob_w = 0.0;
    double v_total = 0.0;
    double v_theta = 0.0;
    double v_w = 0.0;
    double delta_v = 0.0;     // |V(t) - V(t-1)|
    double density = 0.0;
    double max_embedding_norm = 0.0;
    std::vector<std::string> stages;  // execution order, for instrumentation
};

/// One training iteration, in order:
///   graph -> sync -> attention/forward -> task gradient step (P, readout)
///   -> global r -> gated Hebbian update on active edges -> Riemannian
///   embedding step -> Lyapunov value and |dV|.
/// Gradients for both the task step and the embedding step are taken at the
/// iteration's starting state. `previous_v` is V from the previous iteration.
inline StepMetrics train_step(HoclModel& model, const Dataset& data, double previous_v, std::size_t iteration = 1) {
    StepMetrics m;
    m.iteration = iteration;

    const ForwardResult fr = forward(model, data.inputs, &data.targets);
    m.stages = {"graph", "sync", "attention"};
    m.loss = *fr.loss;
    if (!std::isfinite(m.loss)) {
        throw NumericalError("train_step: non-finite loss at iteration " + std::to_string(iteration));
    }
    m.density = density(fr.graph);

    const TaskGradients g = task_gradients(model, data, model.fd_step);
    for (std::size_t k = 0; k < g.projection.data().size(); ++k) {
        model.projection.data()[k] -= model.alpha_fast * g.projection.data()[k];
    }
    for (std::size_t k = 0; k < g.readout.data().size(); ++k) {
        model.readout.data()[k] -= model.alpha_fast * g.readout.data()[k];
    }
    m.stages.push_back("task_step");

    model.oscillator.phases = fr.phases;
    m.r = fr.r;
    m.stages.push_back("order_parameter");

    const Vector x = hebbian_activations(fr);
    m.hebbian_r = m.r;
    const HebbianStats hs = apply_hebbian(model.weights, x, m.hebbian_r, model.plasticity, model.alpha_slow, &fr.graph);
    m.gate = hs.gate;
    m.mean_abs_dw = hs.mean_abs_change();
    m.stages.push_back("hebbian");

    for (std::size_t i = 0; i < model.units(); ++i) {
        model.embeddings[i] = riemannian_step(model.embeddings[i], g.embeddings[i], model.alpha_embed);
        m.max_embedding_norm = std::max(m.max_embedding_norm, model.embeddings[i].norm());
    }
    m.stages.push_back("embedding_step");

    const LyapunovValue v = lyapunov(model.oscillator, model.weights, model.lyapunov_weight);
    m.v_total = v.total;
    m.v_theta = v.oscillatory;
    m.v_w = v.structural;
    m.frob_w = model.weights.frobenius_norm();
    m.delta_v = std::abs(v.total - previous_v);
    m.stages.push_back("lyapunov");
    if (!std::isfinite(m.v_total)) throw NumericalError("train_step: non-finite Lyapunov value");
    return m;
}

struct TrainResult {
    std::vector<StepMetrics> trace;
    bool converged = false;  // stopped on |dV| < eps_conv
    double final_loss = 0.0;  // loss of the model after the last iteration
};

inline TrainResult train(HoclModel& model, const Dataset& data, std::size_t max_iters, double eps_conv) {
    if (max_iters < 1) throw ArgumentError("train: max_iters must be >= 1");
    model.validate();
    TrainResult result;
    double previous_v = lyapunov(model.oscillator, model.weights, model.lyapunov_weight).total;
    for (std::size_t t = 1; t <= max_iters; ++t) {
        StepMetrics m = train_step(model, data, previous_v, t);
        previous_v = m.v_total;
        const bool done = m.delta_v < eps_conv;
        result.trace.push_back(std::move(m));
        if (done) {
            result.converged = true;
            break;
        }
    }
    result.final_loss = forward_loss(model, data);
    return result;
}

// ---------------------------------------------------------------------------
// Toy problem construction

struct ToyConfig {
    std::size_t units = 16;
    std::size_t dim = 4;
    std::size_t input_dim = 4;
    double coupling = 2.0;
    double kernel_bandwidth = 1.0;
    double frequency_stddev = 0.5;  // sigma_omega
    PlasticityParams plasticity{0.01, 0.01, 0.5, 20.0, GateMode::Smooth, 1.0, false};
    std::optional<double> delta;   // resolved from target_density when absent
    double target_density = 0.4;
    std::optional<std::size_t> k_cap;
    std::size_t sync_steps = 10;
    double dt = 0.05;
    double alpha_fast = 0.05;
    double alpha_slow = 2e-5;  // slow/fast ratio 4e-4, inside the separation bound at N = 16, K = 2
    double alpha_embed = 0.05;
    double lyapunov_weight = 0.3;
    Nonlinearity nonlinearity = Nonlinearity::ReLU;
    double fd_step = 1e-5;
    std::size_t max_iters = 200;
    double eps_conv = 1e-12;
    double embedding_stddev = 0.1;
    double projection_stddev = 0.5;
    double readout_stddev = 0.5;
    double initial_weight_low = 0.1;
    double initial_weight_high = 0.5;
    std::uint64_t seed = 7;
};

/// Smallest delta whose threshold graph has density >= target.
inline double delta_for_density(const std::vector<PoincarePoint>& points, double target) {
    if (!(target > 0.0 && target <= 1.0)) throw ArgumentError("delta_for_density: target must be in (0, 1]");
    const std::size_t n = points.size();
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) d.push_back(hyperbolic_distance(points[i], points[j]));
    }
    std::sort(d.begin(), d.end());
    const double nn = static_cast<double>(n);
    // density = (n + 2 * pairs) / n^2
    const double pairs_needed = std::ceil((target * nn * nn - nn) / 2.0);
    if (pairs_needed <= 0.0 || d.empty()) return d.empty() ? 1.0 : 0.5 * d.front();
    const std::size_t idx = std::min(d.size(), static_cast<std::size_t>(pairs_needed)) - 1;
    const double above = idx + 1 < d.size() ? d[idx + 1] : d[idx] + 1.0;
    return 0.5 * (d[idx] + above);
}

struct ToyProblem {
    HoclModel model;
    Dataset data;
    double resolved_delta = 0.0;
};

// Stream order: inputs, targets, P, readout, anchors, frequencies, phases, weights.
inline ToyProblem make_toy_problem(const ToyConfig& c) {
    if (c.units < 2 || c.dim < 1 || c.input_dim < 1) throw ArgumentError("make_toy_problem: bad dimensions");
    Rng rng = seeded_rng(c.seed);
    ToyProblem tp;
    tp.data.inputs = Matrix(c.units, c.input_dim);
    for (double& v : tp.data.inputs.data()) v = rng.normal();
    tp.data.targets.resize(c.units);
    for (double& v : tp.data.targets) v = rng.normal();

    HoclModel& m = tp.model;
    m.projection = Matrix(c.dim, c.input_dim);
    for (double& v : m.projection.data()) v = rng.normal(0.0, c.projection_stddev);
    m.readout = Matrix(c.units, c.input_dim);
    for (double& v : m.readout.data()) v = rng.normal(0.0, c.readout_stddev);
    for (std::size_t i = 0; i < c.units; ++i) {
        Vector z(c.dim);
        for (double& v : z) v = rng.normal(0.0, c.embedding_stddev);
        m.embeddings.push_back(project_to_ball(std::move(z)));
    }
    Vector omega(c.units);
    for (double& w : omega) w = rng.normal(0.0, c.frequency_stddev);
    center_frequencies(omega);
    Vector theta(c.units);
    for (double& t : theta) t = rng.uniform(0.0, kTwoPi);
    m.oscillator = make_oscillator_state(std::move(theta), std::move(omega), c.coupling, c.kernel_bandwidth);

    m.plasticity = c.plasticity;
    m.k_cap = c.k_cap;
    m.sync_steps = c.sync_steps;
    m.dt = c.dt;
    m.alpha_fast = c.alpha_fast;
    m.alpha_slow = c.alpha_slow;
    m.alpha_embed = c.alpha_embed;
    m.lyapunov_weight = c.lyapunov_weight;
    m.nonlinearity = c.nonlinearity;
    m.fd_step = c.fd_step;

    std::vector<PoincarePoint> positions;
    for (std::size_t i = 0; i < c.units; ++i) {
        positions.push_back(embed_at(m.embeddings[i], tp.data.inputs.row(i), m.projection));
    }
    m.delta = c.delta ? *c.delta : delta_for_density(positions, c.target_density);
    tp.resolved_delta = m.delta;

    // sparse initialization: positive weights on the initial graph's edges
    const SparseGraph g0 = build_graph(positions, m.delta, m.k_cap);
    m.weights = WeightMatrix(c.units);
    for (std::size_t i = 0; i < c.units; ++i) {
        for (std::size_t j = i + 1; j < c.units; ++j) {
            const double v = rng.uniform(c.initial_weight_low, c.initial_weight_high);
            if (g0.linked(i, j)) m.weights.set_symmetric(i, j, v);
        }
    }
    m.validate();
    return tp;
}

}  // namespace hocl
