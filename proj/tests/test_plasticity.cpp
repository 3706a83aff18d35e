#include <gtest/gtest.h>

#include <cmath>

#include "hocl/plasticity.hpp"
#include "hocl/rng.hpp"

using namespace hocl;

namespace {

WeightMatrix random_weights(Rng& rng, std::size_t n, double sd) {
    WeightMatrix w(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) w.set_symmetric(i, j, rng.normal(0.0, sd));
    }
    return w;
}

}  // namespace

TEST(Plasticity, GateValues) {
    PlasticityParams p;
    p.critical_r = 0.5;
    p.sharpness = 20.0;
    EXPECT_EQ(gate(0.5, p), 0.5);
    EXPECT_NEAR(gate(0.55, p), 1.0 / (1.0 + std::exp(-1.0)), 1e-15);
    EXPECT_NEAR(gate(0.55, p), 0.7310585786, 1e-10);
    p.gate_mode = GateMode::Hard;
    EXPECT_EQ(gate(0.49, p), 0.0);
    EXPECT_EQ(gate(0.5, p), 0.0);  // strict inequality
    EXPECT_EQ(gate(0.51, p), 1.0);
}

TEST(Plasticity, GateExtremesDoNotOverflow) {
    PlasticityParams p;
    p.sharpness = 1e6;
    EXPECT_EQ(gate(0.0, p), 0.0);
    EXPECT_EQ(gate(1.0, p), 1.0);
}

TEST(Plasticity, SmoothGateApproachesHard) {
    PlasticityParams s;
    s.sharpness = 1e4;
    PlasticityParams h = s;
    h.gate_mode = GateMode::Hard;
    for (int k = 0; k <= 1000; ++k) {
        const double r = k / 1000.0;
        if (std::abs(r - s.critical_r) < 0.01) continue;
        EXPECT_LT(std::abs(gate(r, s) - gate(r, h)), 1e-6) << r;
    }
}

TEST(Plasticity, GateDerivativeMatchesFiniteDifference) {
    PlasticityParams p;
    p.sharpness = 15.0;
    for (int k = 0; k <= 100; ++k) {
        const double r = k / 100.0;
        const double h = 1e-6;
        const double fd = (gate(r + h, p) - gate(r - h, p)) / (2 * h);
        EXPECT_NEAR(gate_derivative(r, p), fd, 1e-6);
    }
}

TEST(Plasticity, GateLipschitzIsQuarterBeta) {
    for (double beta : {1.0, 15.0, 20.0, 1000.0}) {
        PlasticityParams p;
        p.sharpness = beta;
        double mx = 0.0;
        for (int k = 0; k <= 100000; ++k) mx = std::max(mx, gate_derivative(k / 100000.0, p));
        EXPECT_NEAR(mx, beta / 4.0, 1e-6) << beta;
    }
}

TEST(Plasticity, WeightMatrixValidation) {
    Matrix m(2, 2);
    m(0, 1) = 0.5;
    EXPECT_THROW(WeightMatrix::from_dense(m), ArgumentError);
    m(1, 0) = 0.5;
    EXPECT_EQ(WeightMatrix::from_dense(m)(1, 0), 0.5);
    m(0, 0) = 1.0;
    EXPECT_THROW(WeightMatrix::from_dense(m), ArgumentError);
    EXPECT_THROW(WeightMatrix::from_dense(Matrix(2, 3)), ArgumentError);
}

TEST(Plasticity, PureDecayWhenGateClosed) {
    Rng rng(1);
    const WeightMatrix w = random_weights(rng, 6, 1.0);
    PlasticityParams p;
    p.gate_mode = GateMode::Hard;
    p.gamma = 0.1;
    const Vector x{1, -1, 0.5, 0.2, 0.9, -0.3};
    const WeightMatrix next = hebbian_step(w, x, 0.2, p, 1.0);
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            if (i != j) {
                EXPECT_NEAR(next(i, j), w(i, j) * 0.9, 1e-15);
            }
        }
    }
}

TEST(Plasticity, PureDecayForZeroActivity) {
    Rng rng(2);
    const WeightMatrix w = random_weights(rng, 5, 1.0);
    PlasticityParams p;
    p.gamma = 0.2;
    const WeightMatrix next = hebbian_step(w, Vector(5, 0.0), 0.99, p, 0.5);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            if (i != j) {
                EXPECT_NEAR(next(i, j), w(i, j) * (1 - 0.1), 1e-15);
            }
        }
    }
}

TEST(Plasticity, SingleStepArithmetic) {
    PlasticityParams p;
    p.gate_mode = GateMode::Hard;
    p.eta = 0.01;
    const WeightMatrix next = hebbian_step(WeightMatrix(2), Vector{1.0, 1.0}, 0.9, p, 1.0);
    EXPECT_DOUBLE_EQ(next(0, 1), 0.01);
    EXPECT_DOUBLE_EQ(next(1, 0), 0.01);
    EXPECT_EQ(next(0, 0), 0.0);
}

TEST(Plasticity, PreservesSymmetryAndZeroDiagonal) {
    Rng rng(3);
    WeightMatrix w = random_weights(rng, 12, 0.3);
    PlasticityParams p;
    for (int t = 0; t < 50; ++t) {
        Vector x(12);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        apply_hebbian(w, x, rng.uniform(), p, 1.0);
    }
    for (std::size_t i = 0; i < 12; ++i) {
        EXPECT_EQ(w(i, i), 0.0);
        for (std::size_t j = 0; j < 12; ++j) EXPECT_EQ(w(i, j), w(j, i));
    }
}

TEST(Plasticity, ActivationBoundEnforced) {
    PlasticityParams p;
    p.activation_bound = 1.0;
    WeightMatrix w(3);
    EXPECT_THROW(apply_hebbian(w, Vector{0.0, 1.5, 0.0}, 0.5, p), ContractViolation);
    EXPECT_THROW(apply_hebbian(w, Vector{0.0, NAN, 0.0}, 0.5, p), ContractViolation);
    EXPECT_THROW(apply_hebbian(w, Vector{0.0, 0.0}, 0.5, p), ArgumentError);
}

TEST(Plasticity, GraphRestrictedUpdate) {
    SparseGraph g;
    g.delta = 1.0;
    // k-capped style asymmetry: 0 lists 2 but 2 does not list 0
    g.neighborhoods = {{0, 1, 2}, {0, 1}, {2, 3}, {2, 3}};
    PlasticityParams p;
    p.gate_mode = GateMode::Hard;
    p.eta = 0.1;
    p.gamma = 0.5;
    Matrix m(4, 4, 1.0);
    for (int i = 0; i < 4; ++i) m(i, i) = 0.0;
    WeightMatrix w = WeightMatrix::from_dense(m);
    const Vector x{1.0, 1.0, 1.0, 1.0};
    const HebbianStats st = apply_hebbian(w, x, 0.9, p, 1.0, &g);
    EXPECT_EQ(st.updated_pairs, 3u);  // (0,1), (0,2), (2,3), each once
    EXPECT_DOUBLE_EQ(w(0, 1), 0.6);
    EXPECT_DOUBLE_EQ(w(0, 2), 0.6);
    EXPECT_DOUBLE_EQ(w(2, 3), 0.6);
    EXPECT_EQ(w(1, 3), 1.0);  // inactive: untouched
    EXPECT_EQ(w(0, 3), 1.0);

    p.decay_everywhere = true;
    WeightMatrix w2 = WeightMatrix::from_dense(m);
    const HebbianStats st2 = apply_hebbian(w2, x, 0.9, p, 1.0, &g);
    EXPECT_EQ(st2.updated_pairs, 6u);
    EXPECT_DOUBLE_EQ(w2(0, 1), 0.6);
    EXPECT_DOUBLE_EQ(w2(1, 3), 0.5);  // decay only
}

TEST(Plasticity, StepMultiplierScalesUpdate) {
    PlasticityParams p;
    p.gate_mode = GateMode::Hard;
    p.eta = 0.2;
    p.gamma = 0.1;
    Matrix m(2, 2);
    m(0, 1) = m(1, 0) = 0.4;
    const WeightMatrix w = WeightMatrix::from_dense(m);
    const WeightMatrix a = hebbian_step(w, Vector{0.5, -1.0}, 0.9, p, 0.25);
    EXPECT_DOUBLE_EQ(a(0, 1), 0.4 + 0.25 * (-0.1 * 0.4 + 0.2 * 0.5 * -1.0));
}

TEST(Plasticity, WeightBound) {
    PlasticityParams p;
    p.eta = 0.01;
    p.gamma = 0.001;
    EXPECT_DOUBLE_EQ(weight_bound(p, 1.0, 50), 500.0);
    EXPECT_DOUBLE_EQ(weight_bound(p, 1.0, 100), 1000.0);
    p.eta = 0.0;
    EXPECT_EQ(weight_bound(p, 1.0, 50), 0.0);
    p.gamma = 0.0;
    EXPECT_THROW(weight_bound(p, 1.0, 50), ArgumentError);
}

TEST(Plasticity, FrobeniusDecreasesAboveBound) {
    Rng rng(4);
    for (int k = 0; k < 30; ++k) {
        const std::size_t n = 2 + rng.next_u64() % 20;
        PlasticityParams p;
        p.eta = rng.uniform(0.001, 0.1);
        p.gamma = rng.uniform(0.01, 0.5);
        p.activation_bound = rng.uniform(0.5, 2.0);
        const double bound = weight_bound(p, p.activation_bound, n);
        WeightMatrix w = random_weights(rng, n, 1.0);
        const double scale = bound * rng.uniform(1.01, 3.0) / w.frobenius_norm();
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) for (std::size_t j = 0; j < n; ++j) m(i, j) = w(i, j) * scale;
        w = WeightMatrix::from_dense(m);
        Vector x(n);
        for (double& v : x) v = p.activation_bound * (rng.bernoulli(0.5) ? 1.0 : -1.0);
        const double before = w.frobenius_norm();
        const WeightMatrix next = hebbian_step(w, x, 1.0, p, 0.9);
        EXPECT_LT(next.frobenius_norm(), before);
    }
}
