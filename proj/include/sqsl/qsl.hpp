#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sqsl/dynamics.hpp"
#include "sqsl/errors.hpp"
#include "sqsl/linalg.hpp"

namespace sqsl {

struct LambdaAverages {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
};

struct QslResult {
    double bures = 0.0;       // Bures angle between rho(0) and rho(tau)
    double sin2_bures = 0.0;  // 1 - fidelity
    double lambda_op = 0.0;
    double lambda_tr = 0.0;
    double lambda_hs = 0.0;
    double t_op = 0.0;
    double t_tr = 0.0;
    double t_hs = 0.0;
    double t_qsl = 0.0;
    bool frozen = false;      // state did not move; all times set to 0
};

inline constexpr double kPurityTolerance = 1e-9;
inline constexpr double kFidelitySlack = 1e-9;
// Below this displacement 1 - F the endpoint is indistinguishable from the
// start and the speed-limit ratio is 0/0; report frozen dynamics.
inline constexpr double kFrozenDisplacement = 1e-9;

namespace detail {

inline double fidelity_with_pure(const CMatrix& rho0_pure, const CMatrix& rho_t) {
    if (rho0_pure.rows() != rho_t.rows() || !rho0_pure.is_square() || !rho_t.is_square()) {
        throw DimensionMismatch("bures_angle " + rho0_pure.shape() + " vs " + rho_t.shape());
    }
    const double purity = (rho0_pure * rho0_pure).trace().real();
    const double trace = rho0_pure.trace().real();
    if (std::abs(trace - 1.0) > kPurityTolerance || purity < 1.0 - kPurityTolerance) {
        throw NotPure("initial state purity " + std::to_string(purity) + ", trace " + std::to_string(trace));
    }
    // For pure rho0 = |psi><psi|, <psi|rho_t|psi> = tr(rho0 rho_t).
    const double f = (rho0_pure * rho_t).trace().real();
    if (f > 1.0 + kFidelitySlack || f < -kFidelitySlack) {
        throw FidelityOutOfRange("overlap " + std::to_string(f) + " outside [0, 1]");
    }
    return std::clamp(f, 0.0, 1.0);
}

}  // namespace detail

/// arccos(sqrt(<psi(0)|rho_t|psi(0)>)) for a pure rho0.
inline double bures_angle(const CMatrix& rho0_pure, const CMatrix& rho_t) {
    return std::acos(std::sqrt(detail::fidelity_with_pure(rho0_pure, rho_t)));
}

/// Trapezoidal time averages of the op/tr/hs norms of rho_atom_dot.
inline LambdaAverages lambda_averages(const Trajectory& traj) {
    const std::size_t n = traj.size();
    if (n < 2 || traj.rho_atom_dot.size() != n) {
        throw EmptyTrajectory("need >= 2 grid points with rho_atom_dot, got " + std::to_string(n));
    }
    LambdaAverages sum;
    MatrixNorms prev = norms_of_hermitian(traj.rho_atom_dot[0]);
    for (std::size_t k = 1; k < n; ++k) {
        const MatrixNorms cur = norms_of_hermitian(traj.rho_atom_dot[k]);
        const double w = 0.5 * (traj.times[k] - traj.times[k - 1]);
        sum.op += w * (prev.op + cur.op);
        sum.tr += w * (prev.tr + cur.tr);
        sum.hs += w * (prev.hs + cur.hs);
        prev = cur;
    }
    const double span = traj.times.back() - traj.times.front();
    if (!(span > 0.0)) throw EmptyTrajectory("zero-length time grid");
    return {sum.op / span, sum.tr / span, sum.hs / span};
}

/// Atom-space pure initial state cos(alpha)|e> + sin(alpha)|g>.
inline CMatrix atom_initial_state(double alpha) {
    const double c = std::cos(alpha), s = std::sin(alpha);
    return CMatrix{{c * c, c * s}, {s * c, s * s}};
}

/// Per-norm speed-limit times sin^2(B)/Lambda and their maximum, evaluated
/// between rho(0) and the trajectory end point.
inline QslResult qsl_time(const Trajectory& traj) {
    if (traj.size() < 2) throw EmptyTrajectory("trajectory has fewer than 2 points");
    const CMatrix rho0 = atom_initial_state(traj.alpha);
    const double f = detail::fidelity_with_pure(rho0, traj.rho_atom.back());
    const LambdaAverages lam = lambda_averages(traj);

    QslResult r;
    r.bures = std::acos(std::sqrt(f));
    r.sin2_bures = 1.0 - f;
    r.lambda_op = lam.op;
    r.lambda_tr = lam.tr;
    r.lambda_hs = lam.hs;
    if (r.sin2_bures <= kFrozenDisplacement || lam.op == 0.0) {
        r.frozen = true;
        return r;
    }
    r.t_op = r.sin2_bures / lam.op;
    r.t_tr = r.sin2_bures / lam.tr;
    r.t_hs = r.sin2_bures / lam.hs;
    r.t_qsl = std::max({r.t_op, r.t_tr, r.t_hs});
    return r;
}

}  // namespace sqsl
