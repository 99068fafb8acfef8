// eigen_small.hpp — Small dense non-Hermitian eigenproblems with biorthonormal left vectors
//
// Templated on the real scalar so the same code runs in double and in
// quad precision (boost::multiprecision::float128).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <sstream>
#include <vector>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn {

template <class Real>
using MatrixXc = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using VectorXc = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <class Real>
struct EigenPair {
    std::complex<Real> value;
    VectorXc<Real> right;  // unit norm
    VectorXc<Real> left;   // ⟨left, right⟩ = 1
};

// Known exact null pair of M: M r = 0 and Mᴴ l = 0.
template <class Real>
struct KnownKernel {
    VectorXc<Real> right;
    VectorXc<Real> left;
};

namespace detail {

template <class Real>
void check_residuals(const MatrixXc<Real>& m, const std::vector<EigenPair<Real>>& pairs,
                     double rel_tol) {
    const Real scale = std::max<Real>(m.norm(), Real(1e-300));
    for (const auto& p : pairs) {
        const Real rr = (m * p.right - p.value * p.right).norm();
        const Real rl = (m.adjoint() * p.left - std::conj(p.value) * p.left).norm() /
                        std::max<Real>(p.left.norm(), Real(1e-300));
        if (rr > Real(rel_tol) * scale || rl > Real(rel_tol) * scale) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "eigensolver residual too large for eigenvalue ("
                << static_cast<double>(p.value.real()) << ", "
                << static_cast<double>(p.value.imag()) << "): right "
                << static_cast<double>(rr / scale) << ", left " << static_cast<double>(rl / scale);
            throw NumericError(msg.str());
        }
    }
}

} // namespace detail

// Full spectrum of M with left vectors taken as rows of R⁻¹ for the matrix R
// of unit right vectors. When a kernel pair is supplied it is split off first:
// Mᴴ l = 0 means M maps into l^⊥, so the remaining spectrum is that of QᴴMQ for
// an orthonormal basis Q of l^⊥, and the zero eigenvalue stays exact.
template <class Real>
std::vector<EigenPair<Real>> eigensolve_small(const MatrixXc<Real>& m,
                                              const KnownKernel<Real>* kernel = nullptr,
                                              double residual_tol = 1e-8) {
    using C = std::complex<Real>;
    const Eigen::Index n = m.rows();
    if (n != m.cols() || n < 1 || n > 5) {
        throw DomainError("eigensolve_small handles square matrices of size 1..5");
    }

    MatrixXc<Real> r(n, n);
    VectorXc<Real> values(n);
    if (kernel) {
        if (kernel->right.size() != n || kernel->left.size() != n) {
            throw DomainError("kernel vectors have the wrong dimension");
        }
        VectorXc<Real> l0 = kernel->left / kernel->left.norm();
        const MatrixXc<Real> l0m = l0;
        Eigen::HouseholderQR<MatrixXc<Real>> qr(l0m);
        const MatrixXc<Real> full = qr.householderQ() * MatrixXc<Real>::Identity(n, n);
        const MatrixXc<Real> q = full.rightCols(n - 1);
        r.col(0) = kernel->right / kernel->right.norm();
        values[0] = C(0);
        if (n > 1) {
            const MatrixXc<Real> reduced = q.adjoint() * m * q;
            Eigen::ComplexEigenSolver<MatrixXc<Real>> ces(reduced);
            if (ces.info() != Eigen::Success) throw NumericError("Schur iteration failed");
            r.rightCols(n - 1) = q * ces.eigenvectors();
            values.tail(n - 1) = ces.eigenvalues();
        }
    } else {
        Eigen::ComplexEigenSolver<MatrixXc<Real>> ces(m);
        if (ces.info() != Eigen::Success) throw NumericError("Schur iteration failed");
        r = ces.eigenvectors();
        values = ces.eigenvalues();
    }
    for (Eigen::Index a = 0; a < n; ++a) r.col(a) /= r.col(a).norm();

    Eigen::FullPivLU<MatrixXc<Real>> lu(r);
    if (!lu.isInvertible()) {
        throw NumericError("eigenvectors are linearly dependent (defective matrix)");
    }
    const MatrixXc<Real> rinv = lu.inverse();

    std::vector<EigenPair<Real>> out;
    out.reserve(n);
    for (Eigen::Index a = 0; a < n; ++a) {
        out.push_back({values[a], r.col(a), rinv.row(a).adjoint()});
    }
    detail::check_residuals(m, out, residual_tol);
    return out;
}

// Largest deviation of ⟨l_a, r_b⟩ from δ_ab.
template <class Real>
Real biorthonormality_error(const std::vector<EigenPair<Real>>& pairs) {
    Real worst = 0;
    for (std::size_t a = 0; a < pairs.size(); ++a)
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            const std::complex<Real> ip = pairs[a].left.dot(pairs[b].right);
            using std::abs;
            const Real d = abs(ip - std::complex<Real>(a == b ? 1 : 0));
            if (d > worst) worst = d;
        }
    return worst;
}

} // namespace lambda_dyn
