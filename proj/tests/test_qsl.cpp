#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sqsl/check.hpp"
#include "sqsl/dynamics.hpp"
#include "sqsl/qsl.hpp"
#include "sqsl/sweep.hpp"

using namespace sqsl;

namespace {

SystemParams fig2_params(double delta_a = 2.0) {
    SystemParams p;
    p.delta_a = delta_a;
    p.delta_c = fig2_delta_c(p.g, p.r_p);
    return p;
}

CMatrix projector(cplx a, cplx b) {
    return CMatrix{{a * std::conj(a), a * std::conj(b)}, {b * std::conj(a), b * std::conj(b)}};
}

}  // namespace

TEST(BuresAngle, Examples) {
    const CMatrix e = CMatrix::diagonal({1, 0});
    const CMatrix g = CMatrix::diagonal({0, 1});
    EXPECT_EQ(bures_angle(e, e), 0.0);
    EXPECT_NEAR(bures_angle(e, g), std::numbers::pi / 2.0, 1e-15);
    EXPECT_NEAR(bures_angle(e, CMatrix::diagonal({0.5, 0.5})), std::numbers::pi / 4.0, 1e-15);
}

TEST(BuresAngle, GlobalPhaseInvariance) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 20; ++k) {
        const CMatrix rho_t = random_density_matrix(2, rng);
        const cplx a(0.6, 0.2), b(std::sqrt(1.0 - std::norm(a)), 0.0);
        const cplx phase = std::polar(1.0, 0.37 * k);
        EXPECT_NEAR(bures_angle(projector(a, b), rho_t), bures_angle(projector(a * phase, b * phase), rho_t), 1e-14);
    }
}

TEST(BuresAngle, Errors) {
    EXPECT_THROW(bures_angle(CMatrix::diagonal({0.5, 0.5}), CMatrix::diagonal({1, 0})), NotPure);
    EXPECT_THROW(bures_angle(CMatrix::diagonal({1, 0}), CMatrix::diagonal({1.1, 0})), FidelityOutOfRange);
    // Round-off just above 1 is clamped.
    EXPECT_EQ(bures_angle(CMatrix::diagonal({1, 0}), CMatrix::diagonal({1.0 + 1e-12, 0})), 0.0);
}

TEST(LambdaAverages, FrozenDynamics) {
    Trajectory tr;
    for (int k = 0; k <= 10; ++k) {
        tr.times.push_back(0.1 * k);
        tr.rho_atom.push_back(CMatrix::diagonal({0, 1}));
        tr.rho_atom_dot.push_back(CMatrix(2, 2));
    }
    const auto l = lambda_averages(tr);
    EXPECT_EQ(l.op, 0.0);
    EXPECT_EQ(l.tr, 0.0);
    EXPECT_EQ(l.hs, 0.0);
}

TEST(LambdaAverages, TrapezoidOnKnownIntegrand) {
    // rho_dot = diag(t, -t) on [0, 2]: op average = 1 exactly under trapezoid.
    Trajectory tr;
    for (int k = 0; k <= 4; ++k) {
        const double t = 0.5 * k;
        tr.times.push_back(t);
        tr.rho_atom.push_back(CMatrix::diagonal({1, 0}));
        tr.rho_atom_dot.push_back(CMatrix::diagonal({t, -t}));
    }
    const auto l = lambda_averages(tr);
    EXPECT_NEAR(l.op, 1.0, 1e-15);
    EXPECT_NEAR(l.tr, 2.0, 1e-15);
    EXPECT_NEAR(l.hs, std::sqrt(2.0), 1e-15);
}

TEST(LambdaAverages, DiagonalDynamicsFixNormRatios) {
    // alpha = 0 keeps the reduced atom state diagonal; rho_dot = diag(d, -d).
    const auto tr = evolve_master(fig2_params(), 0, kDefaultSteps, {.record_full = false});
    const auto l = lambda_averages(tr);
    EXPECT_NEAR(l.tr / l.op, 2.0, 1e-12);
    EXPECT_NEAR(l.hs / l.op, std::sqrt(2.0), 1e-12);
}

TEST(LambdaAverages, QuadratureConvergence) {
    SystemParams p = fig2_params(-0.8);
    p.alpha = 0.6;
    const MasterOptions fast{.record_full = false, .diagnostics = false, .check_cutoff = false};
    const auto coarse = lambda_averages(evolve_master(p, 0, 1000, fast));
    const auto fine = lambda_averages(evolve_master(p, 0, 2000, fast));
    EXPECT_LE(std::abs(coarse.op - fine.op) / fine.op, 1e-6);
    EXPECT_LE(std::abs(coarse.tr - fine.tr) / fine.tr, 1e-6);
    EXPECT_LE(std::abs(coarse.hs - fine.hs) / fine.hs, 1e-6);
}

TEST(LambdaAverages, RejectsShortTrajectory) {
    Trajectory tr;
    EXPECT_THROW(lambda_averages(tr), EmptyTrajectory);
    tr.times = {0.0};
    tr.rho_atom = {CMatrix::diagonal({1, 0})};
    tr.rho_atom_dot = {CMatrix(2, 2)};
    EXPECT_THROW(lambda_averages(tr), EmptyTrajectory);
    EXPECT_THROW(qsl_time(tr), EmptyTrajectory);
}

TEST(QslTime, GroundStateIsFrozen) {
    for (double da : {-4.0, 2.0, 7.0}) {
        SystemParams p = fig2_params(da);
        p.alpha = std::numbers::pi / 2.0;
        const auto q = qsl_time(evolve_master(p));
        EXPECT_TRUE(q.frozen);
        EXPECT_LE(q.bures, 1e-6);
        EXPECT_EQ(q.t_qsl, 0.0);
    }
}

TEST(QslTime, ResonancePlateauReachesDrivingTime) {
    SystemParams p = fig2_params();
    p.delta_a = derive(p).delta_s;
    const auto q = qsl_time(evolve_master(p));
    EXPECT_GE(q.t_op / p.tau, 0.9);
    EXPECT_LE(q.t_qsl, p.tau + 1e-6);
}

TEST(QslTime, RevivalDipIsNearZero) {
    // Detuned Rabi revival at tau: sqrt((Da - Ds)^2 + 4 g_s^2) tau = 2 pi.
    SystemParams p = fig2_params();
    const auto d = derive(p);
    const double shift = std::sqrt(4.0 * std::numbers::pi * std::numbers::pi - 4.0 * d.g_s * d.g_s);
    for (double da : {d.delta_s + shift, d.delta_s - shift}) {
        p.delta_a = da;
        const auto q = qsl_time(evolve_master(p));
        EXPECT_LE(q.t_op / p.tau, 0.1) << da;
    }
    EXPECT_NEAR(d.delta_s + shift, 3.0 * d.delta_s, 0.1);
    EXPECT_NEAR(d.delta_s - shift, -d.delta_s, 0.1);
}

TEST(QslTime, NormOrderingAndBound) {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 15; ++k) {
        SweepSpec s;
        s.base.alpha = u(rng) * std::numbers::pi / 2.0;
        s.base.r_p = 1.4 * u(rng);
        const SystemParams p = resolve_point(s, -10.0 + 20.0 * u(rng), std::nullopt);
        const auto q = qsl_time(evolve_master(p, 0, kDefaultSteps, {.record_full = false}));
        EXPECT_GE(q.t_op, q.t_hs);
        EXPECT_GE(q.t_hs, q.t_tr);
        EXPECT_EQ(q.t_qsl, q.t_op);
        EXPECT_GE(q.t_qsl, 0.0);
        EXPECT_LE(q.t_qsl, p.tau + 1e-6);
    }
}

TEST(QslTime, ClosedFormAndMasterEquationAgree) {
    for (double da : {-7.0, -1.0, 2.0, 5.5}) {
        const SystemParams p = fig2_params(da);
        const auto qa = qsl_time(analytic_trajectory(p, kDefaultSteps));
        const auto qm = qsl_time(evolve_master(p, 0, kDefaultSteps, {.record_full = false}));
        EXPECT_NEAR(qa.bures, qm.bures, 1e-9);
        for (auto [a, m] : {std::pair{qa.t_op, qm.t_op}, {qa.t_tr, qm.t_tr}, {qa.t_hs, qm.t_hs}}) {
            const double tol = m < 0.1 * p.tau ? 0.02 * p.tau : 0.02 * m;
            EXPECT_LE(std::abs(a - m), tol) << da;
        }
    }
}
