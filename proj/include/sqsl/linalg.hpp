#pragma once

// Dense complex matrices on small truncated bases (dimension <= ~40).
//
// Basis convention for atom (x) cavity operators, used everywhere:
//   index = atom_index * fock_dim + fock_index,  atom_index 0 = |e>, 1 = |g>.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqsl/errors.hpp"

namespace sqsl {

using cplx = std::complex<double>;

class CMatrix {
public:
    CMatrix() = default;

    CMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

    /// Row-major nested initializer: CMatrix{{1, 2}, {3, 4}}.
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
        : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) {
                throw DimensionMismatch("ragged initializer list");
            }
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static CMatrix zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

    static CMatrix identity(std::size_t n) {
        CMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static CMatrix diagonal(std::span<const cplx> d) {
        CMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    static CMatrix diagonal(std::initializer_list<cplx> d) {
        return diagonal(std::span<const cplx>(d.begin(), d.size()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool is_square() const noexcept { return rows_ == cols_; }

    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    CMatrix& operator+=(const CMatrix& o) {
        require_same_shape(o, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }

    CMatrix& operator-=(const CMatrix& o) {
        require_same_shape(o, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }

    CMatrix& operator*=(cplx s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(double s, CMatrix a) { return a *= cplx{s, 0.0}; }

    friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
        if (a.cols_ != b.rows_) {
            throw DimensionMismatch("matmul " + a.shape() + " * " + b.shape());
        }
        CMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) continue;
                const cplx* brow = &b.data_[k * b.cols_];
                cplx* crow = &c.data_[i * c.cols_];
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

    friend bool operator==(const CMatrix&, const CMatrix&) = default;

    cplx trace() const {
        cplx t{};
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : data_) m = std::max(m, std::abs(x));
        return m;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const cplx& x) {
            return std::isfinite(x.real()) && std::isfinite(x.imag());
        });
    }

    std::string shape() const {
        return std::to_string(rows_) + "x" + std::to_string(cols_);
    }

private:
    void require_same_shape(const CMatrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) {
            throw DimensionMismatch(std::string(op) + " " + shape() + " vs " + o.shape());
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Spectral decomposition of a Hermitian matrix.
struct HermitianEig {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // column k pairs with eigenvalues[k]
};

struct MatrixNorms {
    double op = 0.0;
    double tr = 0.0;
    double hs = 0.0;
};

inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx aij = a(i, j);
            if (aij == cplx{}) continue;
            for (std::size_t p = 0; p < b.rows(); ++p)
                for (std::size_t q = 0; q < b.cols(); ++q)
                    k(i * b.rows() + p, j * b.cols() + q) = aij * b(p, q);
        }
    return k;
}

inline CMatrix dagger(const CMatrix& a) {
    CMatrix d(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) d(j, i) = std::conj(a(i, j));
    return d;
}

/// Largest entrywise |m - m^dagger|.
inline double hermiticity_error(const CMatrix& m) {
    if (!m.is_square()) throw DimensionMismatch("hermiticity of " + m.shape());
    double e = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i; j < m.cols(); ++j)
            e = std::max(e, std::abs(m(i, j) - std::conj(m(j, i))));
    return e;
}

/// Largest entrywise difference; matrices must share a shape.
inline double max_abs_diff(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionMismatch("compare " + a.shape() + " vs " + b.shape());
    }
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.data()[i] - b.data()[i]));
    return e;
}

namespace detail {

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr int kJacobiMaxSweeps = 100;

inline double off_diagonal_norm(const CMatrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
}

}  // namespace detail

/// Cyclic complex Jacobi. The input is symmetrized as (M + M^dagger)/2 first;
/// a pre-symmetrization deviation above 1e-10 * max(1, max|m_ij|) is rejected.
inline HermitianEig hermitian_eig(const CMatrix& m) {
    if (!m.is_square()) throw DimensionMismatch("hermitian_eig of " + m.shape());
    if (!m.all_finite()) throw NonFiniteValue("hermitian_eig input has NaN/Inf");

    const std::size_t n = m.rows();
    const double scale = m.max_abs();
    const double herr = hermiticity_error(m);
    if (herr > detail::kHermitianTolerance * std::max(1.0, scale)) {
        throw NotHermitian("deviation " + std::to_string(herr));
    }

    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
    for (std::size_t i = 0; i < n; ++i) a(i, i) = a(i, i).real();

    CMatrix v = CMatrix::identity(n);
    const double total = std::sqrt(std::accumulate(
        a.data().begin(), a.data().end(), 0.0,
        [](double s, const cplx& x) { return s + std::norm(x); }));
    const double target = 1e-15 * std::max(total, 1e-300);

    int sweep = 0;
    for (; sweep < detail::kJacobiMaxSweeps; ++sweep) {
        if (detail::off_diagonal_norm(a) <= target) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double mag = std::abs(apq);
                if (mag == 0.0) continue;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                // Phase-rotate the pair to a real symmetric 2x2, then apply a
                // classical Jacobi rotation. Combined unitary on columns p, q:
                //   U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]],  apq = |apq| e^{i phi}.
                const cplx phase = apq / mag;
                const double theta = (aqq - app) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const cplx up_p = c, up_q = s;
                const cplx uq_p = -s * std::conj(phase), uq_q = c * std::conj(phase);

                // a <- a U
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * up_p + akq * uq_p;
                    a(k, q) = akp * up_q + akq * uq_q;
                }
                // a <- U^dagger a
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(up_p) * apk + std::conj(uq_p) * aqk;
                    a(q, k) = std::conj(up_q) * apk + std::conj(uq_q) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * up_p + vkq * uq_p;
                    v(k, q) = vkp * up_q + vkq * uq_q;
                }
            }
        }
    }
    if (sweep == detail::kJacobiMaxSweeps) {
        throw NoConvergence("Jacobi residual " + std::to_string(detail::off_diagonal_norm(a)) +
                            " after " + std::to_string(sweep) + " sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEig out{std::vector<double>(n), CMatrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
    }
    return out;
}

inline double min_eigenvalue(const CMatrix& m) { return hermitian_eig(m).eigenvalues.front(); }

/// Operator, trace and Hilbert-Schmidt norms of a Hermitian matrix, from its
/// spectrum (|eigenvalues| are the singular values).
inline MatrixNorms norms_of_hermitian(const CMatrix& m) {
    const auto eig = hermitian_eig(m);
    MatrixNorms n;
    double sq = 0.0;
    for (double l : eig.eigenvalues) {
        n.op = std::max(n.op, std::abs(l));
        n.tr += std::abs(l);
        sq += l * l;
    }
    n.hs = std::sqrt(sq);
    return n;
}

/// Reduces a (2n)x(2n) atom (x) Fock operator to the 2x2 atom block:
/// out(i, j) = sum_k rho[(i,k), (j,k)].
inline CMatrix partial_trace_cavity(const CMatrix& rho, std::size_t atom_dim, std::size_t fock_dim) {
    if (atom_dim == 0 || fock_dim == 0 || rho.rows() != atom_dim * fock_dim || !rho.is_square()) {
        throw DimensionMismatch("partial trace of " + rho.shape() + " over " +
                                std::to_string(atom_dim) + "x" + std::to_string(fock_dim));
    }
    CMatrix out(atom_dim, atom_dim);
    for (std::size_t i = 0; i < atom_dim; ++i)
        for (std::size_t j = 0; j < atom_dim; ++j) {
            cplx s{};
            for (std::size_t k = 0; k < fock_dim; ++k) s += rho(i * fock_dim + k, j * fock_dim + k);
            out(i, j) = s;
        }
    return out;
}

/// Trace distance 1/2 ||a - b||_tr for Hermitian a, b.
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
    return 0.5 * norms_of_hermitian(a - b).tr;
}

}  // namespace sqsl
