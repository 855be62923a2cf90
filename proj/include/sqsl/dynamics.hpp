#pragma once

// Two routes to the atom's reduced dynamics:
//  * closed-form amplitudes of the non-Hermitian single-excitation problem
//    (initial state |e,0> only), with a brute-force RK4 oracle for them;
//  * fixed-step RK4 integration of the squeezed-picture master equation on
//    a truncated Fock space, for any initial cos(a)|e,0> + sin(a)|g,0>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "sqsl/errors.hpp"
#include "sqsl/linalg.hpp"
#include "sqsl/model.hpp"

namespace sqsl {

/// Amplitudes of |e,0>, |g,1>, |g,0> plus the closed-form auxiliaries.
struct AnalyticCoeffs {
    cplx a_t{};
    cplx b_t{};
    cplx c_t{};
    cplx mu{};
    cplx nu{};
    cplx xi{};
};

enum class Engine { analytic, master };

inline const char* to_string(Engine e) { return e == Engine::analytic ? "analytic" : "master"; }

struct Trajectory {
    Engine engine = Engine::master;
    double alpha = 0.0;                 // initial atom state cos(a)|e> + sin(a)|g>
    std::size_t fock_cutoff = 0;        // 0 for the closed-form route
    std::vector<double> times;
    std::vector<CMatrix> rho_full;      // empty unless recorded (master route only)
    std::vector<CMatrix> rho_atom;
    std::vector<CMatrix> rho_atom_dot;
    // Per-step physicality diagnostics. For the master route these refer to
    // the full state; for the closed form, to the 2x2 atom matrix.
    std::vector<double> trace_error;
    std::vector<double> hermiticity_error;
    std::vector<double> min_eigenvalue;
    std::optional<double> cutoff_check_distance;  // set when the cutoff check ran

    std::size_t size() const { return times.size(); }
    double max_trace_error() const {
        return trace_error.empty() ? 0.0 : *std::max_element(trace_error.begin(), trace_error.end());
    }
};

namespace detail {

inline constexpr double kSeriesXi = 1e-8;

// Closed-form building blocks, with S = sinh(xi t/4)/xi and Ch = cosh(xi t/4).
// Both are even in xi, so the choice of square-root branch is immaterial.
struct ClosedForm {
    cplx a, b, da, db;
};

inline ClosedForm closed_form(const cplx& mu, const cplx& nu, const cplx& xi, double g_s, double t) {
    const cplx i{0.0, 1.0};
    const cplx quarter = xi * (0.25 * t);
    cplx s, ch;
    if (std::abs(xi) < kSeriesXi) {
        // sinh(x)/xi -> t/4 (1 + x^2/6), cosh(x) -> 1 + x^2/2
        s = 0.25 * t * (1.0 + quarter * quarter / 6.0);
        ch = 1.0 + 0.5 * quarter * quarter;
    } else {
        s = std::sinh(quarter) / xi;
        ch = std::cosh(quarter);
    }
    const cplx xi2 = mu * mu - 16.0 * g_s * g_s;  // xi * sinh(xi t/4) = xi2 * s
    const cplx decay = std::exp(-0.25 * nu * t);

    ClosedForm f;
    f.a = decay * (ch - mu * s);
    f.b = -4.0 * i * g_s * decay * s;
    // d/dt: dS/dt = Ch/4, dCh/dt = xi2 S / 4
    f.da = decay * (-0.25 * nu * (ch - mu * s) + 0.25 * xi2 * s - 0.25 * mu * ch);
    f.db = -4.0 * i * g_s * decay * (-0.25 * nu * s + 0.25 * ch);
    return f;
}

inline std::tuple<cplx, cplx, cplx> auxiliaries(const SystemParams& p, const DerivedParams& d) {
    const cplx i{0.0, 1.0};
    const cplx mu = (p.gamma - p.kappa) + 2.0 * i * (p.delta_a - d.delta_s);
    const cplx nu = (p.gamma + p.kappa) + 2.0 * i * (p.delta_a + d.delta_s);
    const cplx xi = std::sqrt(mu * mu - 16.0 * d.g_s * d.g_s);
    return {mu, nu, xi};
}

inline void require_excited_start(const SystemParams& p) {
    if (p.alpha != 0.0) {
        throw WrongInitialState("closed form covers only |e,0> (alpha = 0), got alpha = " +
                                std::to_string(p.alpha));
    }
}

}  // namespace detail

inline AnalyticCoeffs analytic_coeffs(const SystemParams& p, double t) {
    validate(p);
    detail::require_excited_start(p);
    if (t < 0.0) throw InvalidParameter("t must be >= 0");
    const DerivedParams d = derive(p);
    const auto [mu, nu, xi] = detail::auxiliaries(p, d);
    const auto f = detail::closed_form(mu, nu, xi, d.g_s, t);
    return {f.a, f.b, cplx{}, mu, nu, xi};
}

/// Time derivatives (dA/dt, dB/dt) of the closed-form amplitudes.
inline std::pair<cplx, cplx> analytic_coeff_derivatives(const SystemParams& p, double t) {
    validate(p);
    detail::require_excited_start(p);
    const DerivedParams d = derive(p);
    const auto [mu, nu, xi] = detail::auxiliaries(p, d);
    const auto f = detail::closed_form(mu, nu, xi, d.g_s, t);
    return {f.da, f.db};
}

/// Brute-force RK4 on the 2x2 amplitude system
///   i dA/dt = (Delta_a - i gamma/2) A + g_s B
///   i dB/dt = (Delta_s - i kappa/2) B + g_s A
/// from (A, B) = (1, 0). Independent of the closed form.
inline AnalyticCoeffs ode_oracle_coeffs(const SystemParams& p, double t, double step) {
    validate(p);
    detail::require_excited_start(p);
    const DerivedParams d = derive(p);
    const auto [mu, nu, xi] = detail::auxiliaries(p, d);
    const double limit = 1e-3 * std::min(1.0, 1.0 / std::abs(xi));
    if (!(step > 0.0) || step > limit) {
        throw StepTooLarge("step " + std::to_string(step) + " exceeds " + std::to_string(limit));
    }

    const cplx i{0.0, 1.0};
    const cplx maa = -i * cplx{p.delta_a, -0.5 * p.gamma};
    const cplx mbb = -i * cplx{d.delta_s, -0.5 * p.kappa};
    const cplx mab = -i * d.g_s;
    auto rhs = [&](cplx a, cplx b) { return std::pair{maa * a + mab * b, mab * a + mbb * b}; };

    cplx a = 1.0, b = 0.0;
    const auto n = static_cast<long long>(std::ceil(t / step - 1e-9));
    const double h = n > 0 ? t / static_cast<double>(n) : 0.0;
    for (long long k = 0; k < n; ++k) {
        const auto [ka1, kb1] = rhs(a, b);
        const auto [ka2, kb2] = rhs(a + 0.5 * h * ka1, b + 0.5 * h * kb1);
        const auto [ka3, kb3] = rhs(a + 0.5 * h * ka2, b + 0.5 * h * kb2);
        const auto [ka4, kb4] = rhs(a + h * ka3, b + h * kb3);
        a += h / 6.0 * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
        b += h / 6.0 * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    }
    return {a, b, cplx{}, mu, nu, xi};
}

/// Reduced atom matrix [[|A|^2, A C*], [A* C, |B|^2 + |C|^2]] with C = 0.
/// Its trace is |A|^2 + |B|^2 <= 1; the deficit is what decay removed.
inline CMatrix analytic_atom_state(const SystemParams& p, double t) {
    const auto c = analytic_coeffs(p, t);
    return CMatrix{{std::norm(c.a_t), c.a_t * std::conj(c.c_t)},
                   {std::conj(c.a_t) * c.c_t, std::norm(c.b_t) + std::norm(c.c_t)}};
}

/// Closed-form trajectory on the grid t_k = k tau / steps, with rho_atom_dot
/// from exact differentiation: diag(d|A|^2/dt, d|B|^2/dt).
inline Trajectory analytic_trajectory(const SystemParams& p, std::size_t steps) {
    validate(p);
    detail::require_excited_start(p);
    if (steps < 1) throw InvalidParameter("steps must be >= 1");
    const DerivedParams d = derive(p);
    const auto [mu, nu, xi] = detail::auxiliaries(p, d);

    Trajectory tr;
    tr.engine = Engine::analytic;
    tr.alpha = 0.0;
    const double h = p.tau / static_cast<double>(steps);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double t = k == steps ? p.tau : h * static_cast<double>(k);
        const auto f = detail::closed_form(mu, nu, xi, d.g_s, t);
        const double pe = std::norm(f.a), pg = std::norm(f.b);
        const double dpe = 2.0 * std::real(std::conj(f.a) * f.da);
        const double dpg = 2.0 * std::real(std::conj(f.b) * f.db);
        tr.times.push_back(t);
        tr.rho_atom.push_back(CMatrix::diagonal({pe, pg}));
        tr.rho_atom_dot.push_back(CMatrix::diagonal({dpe, dpg}));
        tr.trace_error.push_back(std::abs(pe + pg - 1.0));
        tr.hermiticity_error.push_back(0.0);
        tr.min_eigenvalue.push_back(std::min(pe, pg));
    }
    return tr;
}

/// Noise parameters of the squeezed bath entering the dissipator.
struct BathParams {
    double n_s = 0.0;
    cplx m_s{};
};

inline BathParams bath_of(const DerivedParams& d) { return {d.n_s, d.m_s}; }

/// Right-hand side of the squeezed-picture master equation:
///   i[rho, H] - 1/2 { L(L_sm) rho + (N+1) L(L_as) rho + N L(L_as^dag) rho
///                     - M L'(L_as^dag) rho - M* L'(L_as) rho }
/// with L(o) rho = o^dag o rho - 2 o rho o^dag + rho o^dag o and
///      L'(o) rho = o o rho - 2 o rho o + rho o o.
inline CMatrix liouvillian(const ModelOperators& ops, const BathParams& bath, const CMatrix& rho) {
    const std::size_t n = ops.dim();
    if (rho.rows() != n || rho.cols() != n) {
        throw DimensionMismatch("rho " + rho.shape() + " vs model dimension " + std::to_string(n));
    }
    const cplx i{0.0, 1.0};
    const CMatrix& h = ops.hamiltonian;
    CMatrix out = i * (rho * h - h * rho);

    auto diss = [&rho](const CMatrix& o) {
        const CMatrix od = dagger(o);
        const CMatrix odo = od * o;
        return odo * rho - 2.0 * (o * rho * od) + rho * odo;
    };
    auto diss_prime = [&rho](const CMatrix& o) {
        const CMatrix oo = o * o;
        return oo * rho - 2.0 * (o * rho * o) + rho * oo;
    };

    CMatrix d = diss(ops.lindblad_atom) + (bath.n_s + 1.0) * diss(ops.lindblad_cavity);
    if (bath.n_s != 0.0) d += bath.n_s * diss(dagger(ops.lindblad_cavity));
    if (bath.m_s != cplx{}) {
        d -= bath.m_s * diss_prime(dagger(ops.lindblad_cavity));
        d -= std::conj(bath.m_s) * diss_prime(ops.lindblad_cavity);
    }
    out -= 0.5 * d;
    return out;
}

inline CMatrix liouvillian(const ModelOperators& ops, const DerivedParams& derived, const CMatrix& rho) {
    return liouvillian(ops, bath_of(derived), rho);
}

/// Liouvillian as a sparse matrix acting on row-major vec(rho), assembled
/// from vec(A X B) = (A (x) B^T) vec(X).
class Superoperator {
public:
    Superoperator(const ModelOperators& ops, const BathParams& bath) : n_(ops.dim()) {
        const std::size_t n = n_;
        const CMatrix id = CMatrix::identity(n);
        const cplx i{0.0, 1.0};
        std::vector<Triplet> t;

        auto add = [&](cplx coef, const CMatrix& left, const CMatrix& right) {
            // coef * left X right
            if (coef == cplx{}) return;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b) {
                    const cplx lab = left(a, b);
                    if (lab == cplx{}) continue;
                    for (std::size_t c = 0; c < n; ++c)
                        for (std::size_t e = 0; e < n; ++e) {
                            // (left X right)(a, e) += left(a, b) X(b, c) right(c, e)
                            const cplx rce = right(c, e);
                            if (rce == cplx{}) continue;
                            t.push_back({a * n + e, b * n + c, coef * lab * rce});
                        }
                }
        };
        auto add_diss = [&](cplx coef, const CMatrix& o) {
            const CMatrix od = dagger(o);
            const CMatrix odo = od * o;
            add(coef, odo, id);
            add(-2.0 * coef, o, od);
            add(coef, id, odo);
        };
        auto add_diss_prime = [&](cplx coef, const CMatrix& o) {
            const CMatrix oo = o * o;
            add(coef, oo, id);
            add(-2.0 * coef, o, o);
            add(coef, id, oo);
        };

        add(i, id, ops.hamiltonian);
        add(-i, ops.hamiltonian, id);
        add_diss(-0.5, ops.lindblad_atom);
        add_diss(-0.5 * (bath.n_s + 1.0), ops.lindblad_cavity);
        if (bath.n_s != 0.0) add_diss(-0.5 * bath.n_s, dagger(ops.lindblad_cavity));
        if (bath.m_s != cplx{}) {
            add_diss_prime(0.5 * bath.m_s, dagger(ops.lindblad_cavity));
            add_diss_prime(0.5 * std::conj(bath.m_s), ops.lindblad_cavity);
        }

        std::sort(t.begin(), t.end(), [](const Triplet& x, const Triplet& y) {
            return x.row != y.row ? x.row < y.row : x.col < y.col;
        });
        row_ptr_.assign(n * n + 1, 0);
        for (std::size_t k = 0; k < t.size();) {
            std::size_t j = k;
            cplx v{};
            while (j < t.size() && t[j].row == t[k].row && t[j].col == t[k].col) v += t[j++].val;
            if (v != cplx{}) {
                col_.push_back(t[k].col);
                val_.push_back(v);
                ++row_ptr_[t[k].row + 1];
            }
            k = j;
        }
        for (std::size_t r = 0; r < n * n; ++r) row_ptr_[r + 1] += row_ptr_[r];
    }

    std::size_t dim() const { return n_; }
    std::size_t nonzeros() const { return val_.size(); }

    /// y = S x, both of length dim()^2.
    void apply(std::span<const cplx> x, std::span<cplx> y) const {
        for (std::size_t r = 0; r + 1 < row_ptr_.size(); ++r) {
            cplx s{};
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
            y[r] = s;
        }
    }

    CMatrix apply(const CMatrix& rho) const {
        CMatrix out(n_, n_);
        apply(rho.data(), out.data());
        return out;
    }

private:
    struct Triplet {
        std::size_t row, col;
        cplx val;
    };

    std::size_t n_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<cplx> val_;
};

/// rho(0) = |psi><psi| (x) |0><0| with |psi> = cos(alpha)|e> + sin(alpha)|g>.
inline CMatrix initial_state(double alpha, std::size_t cutoff) {
    const std::size_t fd = cutoff + 1;
    std::vector<cplx> psi(2 * fd, cplx{});
    psi[0] = std::cos(alpha);
    psi[fd] = std::sin(alpha);
    CMatrix rho(2 * fd, 2 * fd);
    for (std::size_t r = 0; r < psi.size(); ++r)
        for (std::size_t c = 0; c < psi.size(); ++c) rho(r, c) = psi[r] * std::conj(psi[c]);
    return rho;
}

struct MasterOptions {
    bool record_full = true;    // keep every full-space density matrix
    bool diagnostics = true;    // trace / Hermiticity / min-eigenvalue per step
    bool check_cutoff = true;   // rerun at cutoff + 2 and compare the end state
};

inline constexpr std::size_t kDefaultSteps = 2000;
inline constexpr double kCutoffTolerance = 1e-8;
inline constexpr double kPositivityTolerance = 1e-6;

namespace detail {

inline Trajectory integrate_master(const SystemParams& p, std::size_t cutoff, std::size_t steps,
                                   const MasterOptions& opt) {
    const DerivedParams d = derive(p);
    const ModelOperators ops = build_operators(p, cutoff);
    const Superoperator lv(ops, bath_of(d));
    const std::size_t n = ops.dim();
    const std::size_t fd = ops.fock_dim();
    const std::size_t len = n * n;

    Trajectory tr;
    tr.engine = Engine::master;
    tr.alpha = p.alpha;
    tr.fock_cutoff = cutoff;
    tr.times.reserve(steps + 1);
    tr.rho_atom.reserve(steps + 1);
    tr.rho_atom_dot.reserve(steps + 1);

    CMatrix rho = initial_state(p.alpha, cutoff);
    CMatrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);
    auto x = rho.data();
    const double h = p.tau / static_cast<double>(steps);

    for (std::size_t step = 0;; ++step) {
        const double t = step == steps ? p.tau : h * static_cast<double>(step);
        lv.apply(rho.data(), k1.data());

        tr.times.push_back(t);
        tr.rho_atom.push_back(partial_trace_cavity(rho, 2, fd));
        tr.rho_atom_dot.push_back(partial_trace_cavity(k1, 2, fd));
        if (opt.record_full) tr.rho_full.push_back(rho);
        if (opt.diagnostics) {
            if (!rho.all_finite()) throw NonFiniteValue("state diverged at t = " + std::to_string(t));
            const double lmin = min_eigenvalue(rho);
            tr.trace_error.push_back(std::abs(rho.trace() - 1.0));
            tr.hermiticity_error.push_back(hermiticity_error(rho));
            tr.min_eigenvalue.push_back(lmin);
            if (lmin < -kPositivityTolerance) {
                throw PositivityViolated("min eigenvalue " + std::to_string(lmin) + " at t = " +
                                         std::to_string(t) + "; reduce the step size");
            }
        }
        if (step == steps) break;

        auto kx = tmp.data();
        for (std::size_t i = 0; i < len; ++i) kx[i] = x[i] + 0.5 * h * k1.data()[i];
        lv.apply(tmp.data(), k2.data());
        for (std::size_t i = 0; i < len; ++i) kx[i] = x[i] + 0.5 * h * k2.data()[i];
        lv.apply(tmp.data(), k3.data());
        for (std::size_t i = 0; i < len; ++i) kx[i] = x[i] + h * k3.data()[i];
        lv.apply(tmp.data(), k4.data());
        for (std::size_t i = 0; i < len; ++i) {
            x[i] += h / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
        }
    }
    if (!rho.all_finite()) throw NonFiniteValue("state diverged");
    return tr;
}

}  // namespace detail

/// Fixed-step RK4 of the master equation over [0, tau] with h = tau/steps.
/// cutoff = 0 selects default_cutoff(). Unless disabled, the end state is
/// recomputed at cutoff + 2 and must agree to trace distance 1e-8.
inline Trajectory evolve_master(const SystemParams& p, std::size_t cutoff = 0,
                                std::size_t steps = kDefaultSteps, const MasterOptions& opt = {}) {
    validate(p);
    if (steps < 100) throw InvalidParameter("steps must be >= 100");
    if (cutoff == 0) cutoff = default_cutoff(derive(p));

    Trajectory tr = detail::integrate_master(p, cutoff, steps, opt);
    if (opt.check_cutoff) {
        const MasterOptions fine{.record_full = false, .diagnostics = false, .check_cutoff = false};
        const Trajectory ref = detail::integrate_master(p, cutoff + 2, steps, fine);
        const double dist = trace_distance(tr.rho_atom.back(), ref.rho_atom.back());
        tr.cutoff_check_distance = dist;
        if (dist > kCutoffTolerance) {
            throw CutoffNotConverged("cutoff " + std::to_string(cutoff) + " vs " +
                                     std::to_string(cutoff + 2) + ": trace distance " +
                                     std::to_string(dist));
        }
    }
    return tr;
}

/// Trajectory CSV: time, the four atom-matrix entries (Re, Im), populations,
/// trace of the atom matrix and the per-step minimum eigenvalue.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t,re_rho_ee,im_rho_ee,re_rho_eg,im_rho_eg,re_rho_ge,im_rho_ge,re_rho_gg,im_rho_gg,"
          "pop_e,pop_g,trace,min_eig\n";
    char buf[32];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const CMatrix& r = tr.rho_atom[k];
        os << num(tr.times[k]);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) os << ',' << num(r(i, j).real()) << ',' << num(r(i, j).imag());
        os << ',' << num(r(0, 0).real()) << ',' << num(r(1, 1).real()) << ',' << num(r.trace().real())
           << ',' << (k < tr.min_eigenvalue.size() ? num(tr.min_eigenvalue[k]) : std::string{}) << '\n';
    }
}

}  // namespace sqsl
