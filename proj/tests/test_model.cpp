#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sqsl/model.hpp"
#include "sqsl/sweep.hpp"

using namespace sqsl;

namespace {

CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SystemParams p;
    p.g = 0.2 + 3.0 * u(rng);
    p.r_p = 1.5 * u(rng);
    p.delta_a = -10.0 + 20.0 * u(rng);
    p.delta_c = -10.0 + 20.0 * u(rng);
    p.theta_p = 2.0 * std::numbers::pi * u(rng);
    p.gamma = 0.1 * u(rng);
    p.kappa = 0.1 * u(rng);
    p.r_e = 1.5 * u(rng);
    p.theta_e = 2.0 * std::numbers::pi * u(rng);
    return p;
}

}  // namespace

TEST(SqueezeParams, ZeroPumpGivesNoSqueezing) { EXPECT_EQ(squeeze_params(0.0, 3.0), 0.0); }

TEST(SqueezeParams, BetaRoundTrip) {
    EXPECT_NEAR(beta_of(0.1), 0.197375320224904011, 1e-15);
    EXPECT_NEAR(squeeze_params(beta_of(0.1) * 4.0, 4.0), 0.1, 1e-15);
    EXPECT_NEAR(squeeze_params(-0.3, 2.0), -squeeze_params(0.3, 2.0), 1e-15);
}

TEST(SqueezeParams, UnstableAtUnitRatio) {
    EXPECT_THROW(squeeze_params(3.0, 3.0), SqueezeUnstable);
    EXPECT_THROW(squeeze_params(-5.0, 3.0), SqueezeUnstable);
    EXPECT_THROW(squeeze_params(1.0, 0.0), SqueezeUnstable);
    // r = artanh(x)/2 = ln((1 + x)/(1 - x))/4
    EXPECT_NEAR(squeeze_params(0.999999, 1.0), 0.25 * std::log(1.999999 / 1e-6), 1e-9);
}

TEST(Derive, NoSqueezing) {
    SystemParams p;
    p.r_p = 0.0;
    p.r_e = 0.0;
    p.delta_c = 2.5;
    const auto d = derive(p);
    EXPECT_EQ(d.beta, 0.0);
    EXPECT_EQ(d.g_s, p.g);
    EXPECT_EQ(d.delta_s, 2.5);
    EXPECT_EQ(d.n_s, 0.0);
    EXPECT_EQ(d.m_s, cplx{});
}

TEST(Derive, MatchedReservoirCancelsNoise) {
    SystemParams p;
    p.r_p = 0.1;
    p.r_e = 0.1;
    p.theta_p = 0.0;
    p.theta_e = std::numbers::pi;
    const auto d = derive(p);
    EXPECT_LE(std::abs(d.n_s), 1e-12);
    EXPECT_LE(std::abs(d.m_s), 1e-12);
}

TEST(Derive, VacuumReservoirLeavesPumpNoise) {
    // r_e = 0: N_s = sinh^2(r_p), M_s = -e^{-i theta_p} sinh(2 r_p)/2.
    for (double theta : {0.0, 0.7}) {
        SystemParams p;
        p.r_p = 0.1;
        p.r_e = 0.0;
        p.theta_p = theta;
        p.theta_e = 1.3;
        const auto d = derive(p);
        EXPECT_NEAR(d.n_s, 0.0100333778095379243, 1e-15);
        const cplx expected = -std::polar(1.0, -theta) * 0.100668001270546999;
        EXPECT_NEAR(std::abs(d.m_s - expected), 0.0, 1e-15);
    }
}

TEST(Derive, CancellationPropertyAndPositivity) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.5);
    for (int k = 0; k < 100; ++k) {
        SystemParams p;
        p.r_p = u(rng);
        p.r_e = p.r_p;
        p.theta_p = 0.0;
        p.theta_e = std::numbers::pi;
        const auto d = derive(p);
        EXPECT_LE(std::abs(d.n_s), 1e-12) << p.r_p;
        EXPECT_LE(std::abs(d.m_s), 1e-12) << p.r_p;

        SystemParams q = random_params(rng);
        EXPECT_GE(derive(q).n_s, -1e-12);
    }
}

TEST(Derive, SqueezedQuantities) {
    std::mt19937_64 rng(12);
    double last = 0.0;
    for (int k = 0; k <= 30; ++k) {
        SystemParams p;
        p.r_p = 0.05 * k;
        p.delta_c = (k % 2 ? -1.0 : 1.0) * (0.5 + k);
        const auto d = derive(p);
        EXPECT_LT(std::abs(d.beta), 1.0);
        EXPECT_GE(d.g_s, p.g);
        EXPECT_EQ(std::signbit(d.delta_s), std::signbit(p.delta_c));
        EXPECT_NEAR(d.delta_s, p.delta_c * std::sqrt(1.0 - d.beta * d.beta), 1e-12 * std::abs(p.delta_c));
        if (k > 0) {
            EXPECT_GT(d.g_s, last);
        }
        last = d.g_s;
    }
}

TEST(BuildOperators, ResonantSingleExcitationBlock) {
    SystemParams p;
    p.delta_a = 0.0;
    p.delta_c = 0.0;
    const auto ops = build_operators(p, 1);
    const double gs = derive(p).g_s;
    // |e,0> = 0, |g,1> = 3
    EXPECT_EQ(ops.hamiltonian(0, 0), cplx{});
    EXPECT_EQ(ops.hamiltonian(3, 3), cplx{});
    EXPECT_NEAR(ops.hamiltonian(0, 3).real(), gs, 1e-15);
    EXPECT_NEAR(ops.hamiltonian(3, 0).real(), gs, 1e-15);
}

TEST(BuildOperators, Fig2aBlock) {
    SystemParams p;
    p.r_p = 0.1;
    p.delta_a = 2.0;
    p.delta_c = fig2_delta_c(1.0, 0.1);
    const auto ops = build_operators(p, 1);
    EXPECT_NEAR(ops.hamiltonian(0, 0).real(), 2.0, 1e-15);
    EXPECT_NEAR(ops.hamiltonian(0, 3).real(), 1.00500416805580360, 1e-14);
    EXPECT_NEAR(ops.hamiltonian(3, 3).real(), 3.01501250416741080, 1e-14);
}

TEST(BuildOperators, CouplingElementIndependentOfCutoff) {
    SystemParams p;
    p.delta_c = 1.7;
    const double gs = derive(p).g_s;
    for (std::size_t cut : {1u, 2u, 5u, 12u}) {
        const auto ops = build_operators(p, cut);
        EXPECT_NEAR(ops.hamiltonian(0, cut + 2).real(), gs, 1e-15) << cut;  // <e,0|H|g,1>
    }
    EXPECT_THROW(build_operators(p, 0), InvalidParameter);
}

TEST(BuildOperators, HermitianAndExcitationConserving) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 50; ++k) {
        const SystemParams p = random_params(rng);
        const std::size_t cut = 1 + k % 6;
        const auto ops = build_operators(p, cut);
        EXPECT_LE(hermiticity_error(ops.hamiltonian), 1e-12);
        const CMatrix a = annihilation(cut);
        const CMatrix number = kron(sigma_plus() * sigma_minus(), CMatrix::identity(cut + 1)) +
                               kron(CMatrix::identity(2), dagger(a) * a);
        EXPECT_LE(commutator(ops.hamiltonian, number).max_abs(), 1e-12);
    }
}

TEST(BuildOperators, JumpOperatorsLowerExcitation) {
    SystemParams p;
    p.gamma = 0.04;
    p.kappa = 0.09;
    const auto ops = build_operators(p, 3);
    const std::size_t fd = ops.fock_dim();
    auto excitation = [fd](std::size_t idx) { return (idx < fd ? 1 : 0) + idx % fd; };
    for (const CMatrix* op : {&ops.lindblad_atom, &ops.lindblad_cavity}) {
        for (std::size_t r = 0; r < ops.dim(); ++r)
            for (std::size_t c = 0; c < ops.dim(); ++c)
                if ((*op)(r, c) != cplx{}) {
                    EXPECT_EQ(excitation(r) + 1, excitation(c));
                }
    }
    EXPECT_NEAR(ops.lindblad_atom(fd, 0).real(), 0.2, 1e-15);
    EXPECT_NEAR(ops.lindblad_cavity(0, 1).real(), 0.3, 1e-15);
}

TEST(BosonicSpectrum, NoPumpSpacingIsDetuning) {
    const auto ev = bosonic_quadratic_spectrum(3.0, 0.0, 10);
    for (std::size_t k = 0; k + 1 < ev.size(); ++k) EXPECT_NEAR(ev[k + 1] - ev[k], 3.0, 1e-12);
}

TEST(BosonicSpectrum, SqueezedSpacingMatchesDeltaS) {
    const double dc = 3.0, rp = 0.1;
    const auto ev = bosonic_quadratic_spectrum(dc, dc * beta_of(rp), 60);
    const double ds = dc * std::sqrt(1.0 - beta_of(rp) * beta_of(rp));
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_LE(std::abs((ev[k + 1] - ev[k]) - ds) / ds, 1e-3) << k;
    }
    EXPECT_THROW(bosonic_quadratic_spectrum(3.0, 3.0, 10), SqueezeUnstable);
}

TEST(DefaultCutoff, DependsOnBath) {
    SystemParams p;
    EXPECT_EQ(default_cutoff(derive(p)), 2u);
    p.r_e = 0.0;
    EXPECT_EQ(default_cutoff(derive(p)), 10u);
}

TEST(Validate, RejectsOutOfRange) {
    SystemParams p;
    p.g = 0.0;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = {};
    p.tau = -1.0;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = {};
    p.kappa = -1e-3;
    EXPECT_THROW(validate(p), InvalidParameter);
    p = {};
    p.r_p = std::nan("");
    EXPECT_THROW(validate(p), InvalidParameter);
}
