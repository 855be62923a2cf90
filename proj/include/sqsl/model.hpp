#pragma once

// Squeezed-picture model of a two-level atom coupled to a parametrically
// pumped cavity mode. hbar = 1; rates and detunings are in units of the
// reference coupling g, times in units of 1/g.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "sqsl/errors.hpp"
#include "sqsl/linalg.hpp"

namespace sqsl {

struct SystemParams {
    double g = 1.0;          // atom-cavity coupling
    double r_p = 0.1;        // pump squeezing parameter
    double delta_a = 2.0;    // atom detuning
    double delta_c = 0.0;    // bare cavity detuning
    double theta_p = 0.0;    // pump phase
    double gamma = 1e-3;     // atomic spontaneous emission
    double kappa = 1e-3;     // cavity decay
    double r_e = 0.1;        // reservoir squeezing
    double theta_e = std::numbers::pi;  // reservoir phase
    double tau = 1.0;        // driving time
    double alpha = 0.0;      // |psi(0)> = cos(alpha)|e,0> + sin(alpha)|g,0>

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct DerivedParams {
    double beta = 0.0;     // Omega_p / Delta_c
    double g_s = 0.0;      // squeezed coupling
    double delta_s = 0.0;  // squeezed-picture cavity detuning
    double n_s = 0.0;      // effective thermal occupation of the squeezed bath
    cplx m_s{};            // two-photon correlation of the squeezed bath
};

/// Hamiltonian and jump operators on atom (x) Fock(0..fock_cutoff).
struct ModelOperators {
    CMatrix hamiltonian;
    CMatrix lindblad_atom;    // sqrt(gamma) sigma_- (x) I
    CMatrix lindblad_cavity;  // sqrt(kappa) I (x) a_s
    std::size_t fock_cutoff = 0;

    std::size_t fock_dim() const { return fock_cutoff + 1; }
    std::size_t dim() const { return 2 * fock_dim(); }
};

inline void validate(const SystemParams& p) {
    auto fail = [](const std::string& key, const std::string& range) {
        throw InvalidParameter(key + " must be " + range);
    };
    const double vals[] = {p.g, p.r_p, p.delta_a, p.delta_c, p.theta_p, p.gamma,
                           p.kappa, p.r_e, p.theta_e, p.tau, p.alpha};
    for (double v : vals) {
        if (!std::isfinite(v)) throw InvalidParameter("parameters must be finite");
    }
    if (!(p.g > 0.0)) fail("g", "> 0");
    if (p.r_p < 0.0) fail("r_p", ">= 0");
    if (p.r_e < 0.0) fail("r_e", ">= 0");
    if (p.gamma < 0.0) fail("gamma", ">= 0");
    if (p.kappa < 0.0) fail("kappa", ">= 0");
    if (!(p.tau > 0.0)) fail("tau", "> 0");
}

/// beta = tanh(2 r_p); exact inverse of squeeze_params.
inline double beta_of(double r_p) { return std::tanh(2.0 * r_p); }

/// r_p = artanh(Omega_p / Delta_c) / 2.
inline double squeeze_params(double omega_p, double delta_c) {
    if (delta_c == 0.0 || !(std::abs(omega_p) < std::abs(delta_c))) {
        throw SqueezeUnstable("|Omega_p| = " + std::to_string(std::abs(omega_p)) +
                              " must be below |Delta_c| = " + std::to_string(std::abs(delta_c)));
    }
    return 0.5 * std::atanh(omega_p / delta_c);
}

inline DerivedParams derive(const SystemParams& p) {
    DerivedParams d;
    d.beta = beta_of(p.r_p);
    d.g_s = p.g * std::cosh(p.r_p);
    // sqrt(1 - tanh^2(2r)) = sech(2r); the sech form stays accurate for large r.
    d.delta_s = p.delta_c / std::cosh(2.0 * p.r_p);

    const double rp = p.r_p, re = p.r_e;
    const double phi = p.theta_e + p.theta_p;
    const double sh_p = std::sinh(rp), ch_p = std::cosh(rp);
    const double sh_e = std::sinh(re);
    d.n_s = sh_e * sh_e * std::cosh(2.0 * rp) + sh_p * sh_p +
            0.5 * std::sinh(2.0 * rp) * std::sinh(2.0 * re) * std::cos(phi);

    const cplx i{0.0, 1.0};
    const cplx bracket = std::exp(i * phi) * (ch_p * ch_p) + std::exp(-i * phi) * (sh_p * sh_p);
    d.m_s = -std::exp(-i * p.theta_p) *
            (0.5 * std::sinh(2.0 * rp) * std::cosh(2.0 * re) + 0.5 * std::sinh(2.0 * re) * bracket);
    return d;
}

/// Annihilation operator on Fock(0..cutoff).
inline CMatrix annihilation(std::size_t cutoff) {
    CMatrix a(cutoff + 1, cutoff + 1);
    for (std::size_t n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// sigma_+ = |e><g| in the (|e>, |g>) ordering.
inline CMatrix sigma_plus() { return CMatrix{{0.0, 1.0}, {0.0, 0.0}}; }
inline CMatrix sigma_minus() { return CMatrix{{0.0, 0.0}, {1.0, 0.0}}; }

/// Photon-number cutoff used when the caller does not pin one: with a
/// vacuum bath (N_s = M_s = 0) at most one excitation is ever present, and
/// one spare level exposes leakage.
inline std::size_t default_cutoff(const DerivedParams& d) {
    constexpr double kVacuumBath = 1e-12;
    return (std::abs(d.n_s) <= kVacuumBath && std::abs(d.m_s) <= kVacuumBath) ? 2 : 10;
}

inline ModelOperators build_operators(const SystemParams& p, std::size_t cutoff) {
    if (cutoff < 1) throw InvalidParameter("cutoff must be >= 1");
    validate(p);
    const DerivedParams d = derive(p);

    const CMatrix a = annihilation(cutoff);
    const CMatrix ad = dagger(a);
    const CMatrix sp = sigma_plus();
    const CMatrix sm = sigma_minus();
    const CMatrix i2 = CMatrix::identity(2);
    const CMatrix ifock = CMatrix::identity(cutoff + 1);

    ModelOperators ops;
    ops.fock_cutoff = cutoff;
    ops.hamiltonian = p.delta_a * kron(sp * sm, ifock) + d.delta_s * kron(i2, ad * a) +
                      d.g_s * (kron(sp, a) + kron(sm, ad));
    ops.lindblad_atom = std::sqrt(p.gamma) * kron(sm, ifock);
    ops.lindblad_cavity = std::sqrt(p.kappa) * kron(i2, a);
    return ops;
}

/// Ascending spectrum of Delta_c a^dagger a + (Omega_p/2)(a^2 + a^dagger^2)
/// truncated at `cutoff` photons.
inline std::vector<double> bosonic_quadratic_spectrum(double delta_c, double omega_p, std::size_t cutoff) {
    if (!(std::abs(omega_p) < std::abs(delta_c))) {
        throw SqueezeUnstable("|Omega_p| must be below |Delta_c|");
    }
    const CMatrix a = annihilation(cutoff);
    const CMatrix ad = dagger(a);
    const CMatrix h = delta_c * (ad * a) + (0.5 * omega_p) * (a * a + ad * ad);
    return hermitian_eig(h).eigenvalues;
}

}  // namespace sqsl
