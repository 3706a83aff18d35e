#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "hocl/oscillator.hpp"
#include "hocl/rng.hpp"
#include "hocl/stability.hpp"

using namespace hocl;
using std::numbers::pi;

namespace {

OscillatorState random_state(Rng& rng, std::size_t n, double k = 2.0, double freq_sd = 1.0) {
    Vector th(n), om(n);
    for (double& t : th) t = rng.uniform(0.0, kTwoPi);
    for (double& w : om) w = rng.normal(0.0, freq_sd);
    return make_oscillator_state(th, om, k, 1.0);
}

}  // namespace

TEST(Oscillator, Compatibility) {
    EXPECT_EQ(compatibility(0.7, 0.7, 1.0), 1.0);
    EXPECT_NEAR(compatibility(0.0, 1.0, 1.0), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(compatibility(0.0, 1.0, 1.0), 0.6065306597, 1e-10);
    Rng rng(1);
    for (int k = 0; k < 50; ++k) {
        const double a = rng.normal(), b = rng.normal();
        EXPECT_EQ(compatibility(a, b, 0.7), compatibility(b, a, 0.7));
    }
    EXPECT_THROW(compatibility(0.0, 1.0, 0.0), ArgumentError);
}

TEST(Oscillator, OrderParameterExamples) {
    EXPECT_DOUBLE_EQ(order_parameter(std::vector<double>{1.3, 1.3, 1.3}).r, 1.0);
    for (std::size_t n : {2u, 3u, 7u, 50u}) {
        Vector th(n);
        for (std::size_t i = 0; i < n; ++i) th[i] = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
        const OrderParameter op = order_parameter(th);
        EXPECT_NEAR(op.r, 0.0, 1e-12) << n;
    }
    const OrderParameter q = order_parameter(std::vector<double>{0.0, pi / 2});
    EXPECT_NEAR(q.r, std::sqrt(2.0) / 2.0, 1e-15);
    EXPECT_NEAR(q.psi, pi / 4, 1e-15);
    EXPECT_THROW(order_parameter(std::vector<double>{}), ArgumentError);
}

TEST(Oscillator, OrderParameterMatchesComplexSum) {
    Rng rng(2);
    for (int k = 0; k < 20; ++k) {
        Vector th(13);
        std::complex<double> z = 0.0;
        for (double& t : th) {
            t = rng.uniform(0.0, kTwoPi);
            z += std::polar(1.0, t);
        }
        z /= 13.0;
        const OrderParameter op = order_parameter(th);
        EXPECT_NEAR(op.r, std::abs(z), 1e-14);
        EXPECT_NEAR(std::abs(wrap_signed(op.psi - std::arg(z))), 0.0, 1e-12);
    }
}

TEST(Oscillator, OrderParameterShiftInvariant) {
    Rng rng(3);
    Vector th(20);
    for (double& t : th) t = rng.uniform(0.0, kTwoPi);
    const double r = order_parameter(th).r;
    for (double& t : th) t = wrap_phase(t + 1.234);
    EXPECT_NEAR(order_parameter(th).r, r, 1e-12);
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
}

TEST(Oscillator, LocalOrderParameter) {
    const Vector th{0.0, pi, 0.3, 2.0};
    const std::vector<std::size_t> single{2};
    EXPECT_DOUBLE_EQ(local_order_parameter(th, single).r, 1.0);
    const std::vector<std::size_t> anti{0, 1};
    EXPECT_NEAR(local_order_parameter(th, anti).r, 0.0, 1e-15);
    const std::vector<std::size_t> all{0, 1, 2, 3};
    EXPECT_DOUBLE_EQ(local_order_parameter(th, all).r, order_parameter(th).r);
    const LocalOrder empty = local_order_parameter(th, std::vector<std::size_t>{});
    EXPECT_EQ(empty.r, 0.0);
    EXPECT_TRUE(empty.degenerate);
}

TEST(Oscillator, DriftTrivialCases) {
    for (auto v : {CouplingVariant::MeanFieldClassical, CouplingVariant::OrderGatedKernel, CouplingVariant::SparseLocal}) {
        const SparseGraph one = SparseGraph::complete(1);
        const OscillatorState s1 = make_oscillator_state({1.0}, {0.7}, 2.0, 1.0);
        EXPECT_EQ(phase_drift(s1, v, &one)[0], 0.7);

        const SparseGraph g3 = SparseGraph::complete(3);
        const OscillatorState same = make_oscillator_state({2.0, 2.0, 2.0}, {0.1, -0.2, 0.1}, 2.0, 1.0);
        const Vector d = phase_drift(same, v, &g3);
        for (int i = 0; i < 3; ++i) EXPECT_EQ(d[i], same.frequencies[i]);

        const SparseGraph g2 = SparseGraph::complete(2);
        const OscillatorState anti = make_oscillator_state({0.0, pi}, {0.3, -0.3}, 2.0, 1.0);
        const Vector a = phase_drift(anti, v, &g2);
        EXPECT_NEAR(a[0], 0.3, 1e-15);
        EXPECT_NEAR(a[1], -0.3, 1e-15);
    }
}

TEST(Oscillator, SparseLocalNeedsGraph) {
    const OscillatorState s = make_oscillator_state({0.0, 1.0}, {0.0, 0.0}, 1.0, 1.0);
    EXPECT_THROW(phase_drift(s, CouplingVariant::SparseLocal), ArgumentError);
}

TEST(Oscillator, DriftMatchesDirectFormulas) {
    // independent re-evaluation of each variant's sum
    Rng rng(4);
    const OscillatorState s = random_state(rng, 9, 1.7);
    const auto& th = s.phases;
    const auto& om = s.frequencies;
    const double n = 9.0;
    std::complex<double> z = 0.0;
    for (double t : th) z += std::polar(1.0, t);
    const double r = std::abs(z) / n;

    const Vector mf = phase_drift(s, CouplingVariant::MeanFieldClassical);
    const Vector og = phase_drift(s, CouplingVariant::OrderGatedKernel);
    for (int i = 0; i < 9; ++i) {
        double a = 0.0, b = 0.0;
        for (int j = 0; j < 9; ++j) {
            a += std::sin(th[j] - th[i]);
            b += std::exp(-(om[i] - om[j]) * (om[i] - om[j]) / 2.0) * std::sin(th[j] - th[i]);
        }
        EXPECT_NEAR(mf[i], om[i] + 1.7 / n * a, 1e-13);
        EXPECT_NEAR(og[i], om[i] + 1.7 * r * b, 1e-13);
    }

    SparseGraph g;
    g.delta = 1.0;
    g.neighborhoods = {{0, 1}, {0, 1, 2}, {1, 2}, {3}, {4, 5, 8}, {4, 5}, {6}, {7, 8}, {4, 7, 8}};
    const Vector sl = phase_drift(s, CouplingVariant::SparseLocal, &g);
    for (int i = 0; i < 9; ++i) {
        std::complex<double> zl = 0.0;
        double b = 0.0;
        for (std::size_t j : g.neighborhoods[i]) {
            zl += std::polar(1.0, th[j]);
            b += std::exp(-(om[i] - om[j]) * (om[i] - om[j]) / 2.0) * std::sin(th[j] - th[i]);
        }
        const double rl = std::abs(zl) / static_cast<double>(g.neighborhoods[i].size());
        EXPECT_NEAR(sl[i], om[i] + 1.7 * rl * b, 1e-13);
    }
}

TEST(Oscillator, SparseLocalOnCompleteGraphEqualsOrderGated) {
    Rng rng(5);
    const OscillatorState s = random_state(rng, 12);
    const SparseGraph g = SparseGraph::complete(12);
    const Vector a = phase_drift(s, CouplingVariant::SparseLocal, &g);
    const Vector b = phase_drift(s, CouplingVariant::OrderGatedKernel);
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Oscillator, MeanFieldDriftSumsToFrequencies) {
    Rng rng(6);
    const OscillatorState s = random_state(rng, 31, 3.0);
    double sd = 0.0, sw = 0.0;
    const Vector d = phase_drift(s, CouplingVariant::MeanFieldClassical);
    for (int i = 0; i < 31; ++i) {
        sd += d[i];
        sw += s.frequencies[i];
    }
    EXPECT_NEAR(sd, sw, 1e-9);
}

TEST(Oscillator, GradientFlowIdentity) {
    // identical frequencies, OrderGatedKernel: drift_i = -N C0 r dV/dtheta_i, checked
    // against central differences of V_theta
    Rng rng(7);
    for (int k = 0; k < 10; ++k) {
        const std::size_t n = 4 + rng.next_u64() % 30;
        const double coupling = rng.uniform(0.5, 4.0);
        Vector th(n);
        for (double& t : th) t = rng.uniform(0.0, kTwoPi);
        const OscillatorState s = make_oscillator_state(th, Vector(n, 0.4), coupling, 1.0);
        const Vector d = phase_drift(s, CouplingVariant::OrderGatedKernel);
        const double r = order_parameter(th).r;
        const double h = 1e-6;
        for (std::size_t i = 0; i < n; ++i) {
            Vector up = th, dn = th;
            up[i] += h;
            dn[i] -= h;
            const double grad = (oscillatory_energy(up, coupling) - oscillatory_energy(dn, coupling)) / (2 * h);
            EXPECT_NEAR(d[i] - 0.4, -static_cast<double>(n) * 1.0 * r * grad, 1e-5);
        }
    }
}

TEST(Oscillator, EulerStep) {
    const OscillatorState s = make_oscillator_state({0.5}, {1.0}, 1.0, 1.0);
    EXPECT_NEAR(euler_phase_step(s, 0.05, CouplingVariant::MeanFieldClassical).phases[0], 0.55, 1e-15);
    const OscillatorState w = make_oscillator_state({kTwoPi - 0.01}, {1.0}, 1.0, 1.0);
    const OscillatorState w2 = euler_phase_step(w, 0.05, CouplingVariant::MeanFieldClassical);
    EXPECT_NEAR(w2.phases[0], 0.04, 1e-12);
    EXPECT_EQ(w2.frequencies, w.frequencies);
    EXPECT_THROW(euler_phase_step(s, 0.0, CouplingVariant::MeanFieldClassical), ArgumentError);
}

TEST(Oscillator, PhasesStayWrapped) {
    Rng rng(8);
    OscillatorState s = random_state(rng, 10, 2.0, 5.0);
    for (int t = 0; t < 200; ++t) {
        s = euler_phase_step(s, 0.05, CouplingVariant::MeanFieldClassical);
        for (double p : s.phases) {
            ASSERT_GE(p, 0.0);
            ASSERT_LT(p, kTwoPi);
        }
    }
}

TEST(Oscillator, WrapHelpers) {
    EXPECT_EQ(wrap_phase(0.0), 0.0);
    EXPECT_NEAR(wrap_phase(-0.1), kTwoPi - 0.1, 1e-15);
    EXPECT_LT(wrap_phase(kTwoPi), kTwoPi);
    EXPECT_NEAR(wrap_signed(3 * pi / 2), -pi / 2, 1e-15);
    EXPECT_NEAR(wrap_signed(-pi), pi, 1e-15);
}

TEST(Oscillator, CenteredFrequencies) {
    Vector w{1.0, 2.0, 4.5, -0.3};
    center_frequencies(w);
    double m = 0.0;
    for (double v : w) m += v;
    EXPECT_NEAR(m / 4.0, 0.0, 1e-12);
}

TEST(Oscillator, SsaAttention) {
    EXPECT_NEAR(ssa_attention(0.3, 0.3, 2.0, 0.8, 1.0), 1.6, 1e-15);
    EXPECT_EQ(ssa_attention(0.0, 2.5, 2.0, 1.0, 1.0), 0.0);
    EXPECT_EQ(ssa_attention(0.0, 0.1, 2.0, 0.0, 1.0), 0.0);
    EXPECT_THROW(ssa_attention(0.0, 0.0, 0.0, 0.5, 1.0), ArgumentError);
    EXPECT_THROW(ssa_attention(0.0, 0.0, 1.0, 1.5, 1.0), ArgumentError);
}

TEST(Oscillator, LocalAttentionMatrix) {
    const SparseGraph g = SparseGraph::complete(4);
    const OscillatorState sync = make_oscillator_state(Vector(4, 1.0), Vector(4, 0.2), 2.5, 1.0);
    const SparseRows a = local_attention_matrix(sync, g);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(a.at(i, j), 2.5);
    }

    SparseGraph sparse;
    sparse.delta = 1.0;
    sparse.neighborhoods = {{0, 2}, {1}, {0, 2}, {}};
    Rng rng(9);
    const OscillatorState s = random_state(rng, 4, 3.0, 0.3);
    const SparseRows b = local_attention_matrix(s, sparse);
    EXPECT_EQ(b.at(0, 1), 0.0);
    EXPECT_EQ(b.at(0, 3), 0.0);
    EXPECT_TRUE(b.values[3].empty());
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_GE(b.at(i, j), 0.0);
            EXPECT_LE(b.at(i, j), 3.0);
        }
    }
    const double r0 = local_order_parameter(s.phases, sparse.neighborhoods[0]).r;
    EXPECT_DOUBLE_EQ(b.at(0, 2), ssa_attention(s.frequencies[0], s.frequencies[2], 3.0, r0, 1.0));
}
