#pragma once

// Built-in invariant suite behind `sqsl check`. Randomized checks draw from
// a seeded std::mt19937_64, so a given seed always samples the same cases.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sqsl/dynamics.hpp"
#include "sqsl/linalg.hpp"
#include "sqsl/model.hpp"
#include "sqsl/qsl.hpp"
#include "sqsl/sweep.hpp"

namespace sqsl {

inline CMatrix random_hermitian(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = nd(rng);
        for (std::size_t j = i + 1; j < n; ++j) {
            m(i, j) = cplx{nd(rng), nd(rng)};
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

/// Random full-rank density matrix G G^dagger / tr(G G^dagger).
inline CMatrix random_density_matrix(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix g(n, n);
    for (auto& x : g.data()) x = cplx{nd(rng), nd(rng)};
    CMatrix rho = g * dagger(g);
    rho *= 1.0 / rho.trace().real();
    return rho;
}

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline CheckResult run_check(const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult r{name, true, {}};
    try {
        r.detail = body(r.passed);
    } catch (const std::exception& e) {
        r.passed = false;
        r.detail = std::string("exception: ") + e.what();
    }
    return r;
}

inline std::string fmt(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

}  // namespace detail

inline std::vector<CheckResult> run_invariant_checks(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * unit(rng); };
    std::vector<CheckResult> out;

    out.push_back(detail::run_check("norm ordering op <= hs <= tr <= sqrt(n) hs", [&](bool& ok) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            const std::size_t n = 2 + static_cast<std::size_t>(unit(rng) * 8);
            const auto m = norms_of_hermitian(random_hermitian(n, rng));
            const double slack = 1e-12 * std::max(1.0, m.tr);
            worst = std::max({worst, m.op - m.hs, m.hs - m.tr, m.tr - std::sqrt(double(n)) * m.hs});
            ok = ok && m.op <= m.hs + slack && m.hs <= m.tr + slack &&
                 m.tr <= std::sqrt(double(n)) * m.hs + slack;
        }
        return "largest violation " + detail::fmt(worst);
    }));

    out.push_back(detail::run_check("eigendecomposition reconstruction", [&](bool& ok) {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            const CMatrix m = random_hermitian(6, rng);
            const auto e = hermitian_eig(m);
            std::vector<cplx> d(e.eigenvalues.begin(), e.eigenvalues.end());
            const CMatrix rec = e.eigenvectors * CMatrix::diagonal(d) * dagger(e.eigenvectors);
            worst = std::max(worst, max_abs_diff(rec, m) / m.max_abs());
        }
        ok = worst < 1e-10;
        return "relative residual " + detail::fmt(worst);
    }));

    out.push_back(detail::run_check("squeezed-bath noise cancels when r_e = r_p, theta_e + theta_p = pi",
                                    [&](bool& ok) {
        double worst = 0.0;
        for (int k = 0; k < 100; ++k) {
            SystemParams p;
            p.r_p = uni(0.0, 1.5);
            p.r_e = p.r_p;
            p.theta_p = 0.0;
            p.theta_e = std::numbers::pi;
            const auto d = derive(p);
            worst = std::max({worst, std::abs(d.n_s), std::abs(d.m_s)});
        }
        ok = worst <= 1e-12;
        return "max |N_s|, |M_s| = " + detail::fmt(worst);
    }));

    out.push_back(detail::run_check("closed-form amplitudes match RK4 oracle", [&](bool& ok) {
        double worst = 0.0;
        for (int k = 0; k < 5; ++k) {
            SystemParams p;
            p.g = uni(0.5, 3.0);
            p.r_p = 0.0;
            p.delta_a = uni(-10.0, 10.0);
            p.delta_c = uni(-10.0, 10.0);
            p.gamma = uni(0.0, 0.1);
            p.kappa = uni(0.0, 0.1);
            const double step = 1e-3 * std::min(1.0, 1.0 / std::abs(analytic_coeffs(p, 0.0).xi));
            for (double t : {0.25, 0.5, 1.0}) {
                const auto a = analytic_coeffs(p, t);
                const auto o = ode_oracle_coeffs(p, t, step);
                worst = std::max({worst, std::abs(a.a_t - o.a_t), std::abs(a.b_t - o.b_t)});
            }
        }
        ok = worst <= 1e-8;
        return "max amplitude error " + detail::fmt(worst);
    }));

    out.push_back(detail::run_check("Liouvillian output is traceless and Hermitian", [&](bool& ok) {
        double worst = 0.0;
        for (int k = 0; k < 20; ++k) {
            SystemParams p;
            p.r_p = uni(0.0, 0.5);
            p.r_e = uni(0.0, 0.5);
            p.theta_e = uni(0.0, 2.0 * std::numbers::pi);
            p.delta_c = uni(-5.0, 5.0);
            p.delta_a = uni(-5.0, 5.0);
            p.gamma = uni(0.0, 0.1);
            p.kappa = uni(0.0, 0.1);
            const auto ops = build_operators(p, 3);
            const CMatrix dr = liouvillian(ops, derive(p), random_density_matrix(ops.dim(), rng));
            worst = std::max({worst, std::abs(dr.trace()), hermiticity_error(dr)});
        }
        ok = worst <= 1e-12;
        return "max |tr|, Hermiticity error " + detail::fmt(worst);
    }));

    out.push_back(detail::run_check("t_op >= t_hs >= t_tr and t_qsl <= tau", [&](bool& ok) {
        int checked = 0;
        for (int k = 0; k < 6; ++k) {
            SweepSpec s;
            s.base.alpha = uni(0.0, std::numbers::pi / 2.0);
            s.base.delta_a = uni(-8.0, 8.0);
            s.base.r_p = uni(0.0, 1.0);
            const SystemParams p = resolve_point(s, s.base.delta_a, std::nullopt);
            const auto q = qsl_time(evolve_master(p, 0, kDefaultSteps, {.record_full = false}));
            const double eps = 1e-12;
            ok = ok && q.t_op + eps >= q.t_hs && q.t_hs + eps >= q.t_tr && q.t_qsl <= p.tau + 1e-6 &&
                 q.t_qsl >= 0.0;
            ++checked;
        }
        return std::to_string(checked) + " random points";
    }));

    return out;
}

}  // namespace sqsl
