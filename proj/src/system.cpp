// system.cpp — Λ-system states, operators and the invariant manifold

#include "lambda_dyn/system.hpp"

#include <cmath>
#include <sstream>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn {

namespace {

bool finite(double x) { return std::isfinite(x); }

} // namespace

void SystemParams::validate() const {
    if (!finite(E0) || !finite(E) || !finite(sigma) || !finite(beta) || !finite(lambda) ||
        !finite(gamma_coupling.real()) || !finite(gamma_coupling.imag())) {
        throw DomainError("system parameters must be finite");
    }
    if (!(gap() > 0.0)) throw DomainError("gap E0 - E must be positive");
    if (!(sigma >= 0.0)) throw DomainError("sigma must be non-negative");
    if (!(beta > 0.0)) throw DomainError("beta must be positive");
    if (gamma_coupling == cd(0.0, 0.0)) throw DomainError("gamma_coupling must be non-zero");
}

double hermiticity_deviation(const Matrix3cd& m) { return (m - m.adjoint()).norm(); }

Matrix3cd hermitize(const Matrix3cd& m) { return 0.5 * (m + m.adjoint()); }

double min_eigenvalue(const Matrix3cd& m) {
    Eigen::SelfAdjointEigenSolver<Matrix3cd> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void validate_density(const DensityMatrix& rho, const DensityTolerance& tol) {
    if (!rho.allFinite()) throw DomainError("density matrix has non-finite entries");
    const double h = hermiticity_deviation(rho);
    if (h > tol.hermitian) {
        std::ostringstream msg;
        msg << "density matrix not Hermitian (deviation " << h << ")";
        throw DomainError(msg.str());
    }
    const cd tr = rho.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream msg;
        msg << "density matrix trace " << tr.real() << " differs from 1";
        throw DomainError(msg.str());
    }
    const double lo = min_eigenvalue(rho);
    if (lo < -tol.negative) {
        std::ostringstream msg;
        msg << "density matrix has negative eigenvalue " << lo;
        throw DomainError(msg.str());
    }
}

Eigen::Matrix3d hamiltonian(const SystemParams& p) {
    return Eigen::Vector3d(p.E0, p.E + 0.5 * p.sigma, p.E - 0.5 * p.sigma).asDiagonal();
}

Matrix3cd coupling_matrix(cd gamma) {
    Matrix3cd g = Matrix3cd::Zero();
    g(0, 1) = 1.0;
    g(1, 0) = 1.0;
    g(0, 2) = gamma;
    g(2, 0) = std::conj(gamma);
    return g;
}

DensityMatrix gibbs(double beta, double gap, double sigma) {
    // Weights relative to the lowest level for overflow safety.
    const Eigen::Vector3d e(gap, 0.5 * sigma, -0.5 * sigma);
    const double lo = e.minCoeff();
    Eigen::Vector3d w = (-beta * (e.array() - lo)).exp();
    w /= w.sum();
    return w.cast<cd>().asDiagonal();
}

Vector3cd dark_state(cd gamma) {
    Vector3cd t(0.0, gamma, -1.0);
    return t / std::sqrt(1.0 + std::norm(gamma));
}

DensityMatrix dark_density(cd gamma) {
    const Vector3cd t = dark_state(gamma);
    return t * t.adjoint();
}

Vector9cd vec(const Matrix3cd& a) {
    Vector9cd v;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) v[3 * j + k] = a(j, k);
    return v;
}

Matrix3cd unvec(const Vector9cd& v) {
    Matrix3cd a;
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) a(j, k) = v[3 * j + k];
    return a;
}

Matrix9cd left_multiplication(const Matrix3cd& a) {
    Matrix9cd m = Matrix9cd::Zero();
    for (int j = 0; j < 3; ++j)
        for (int jj = 0; jj < 3; ++jj)
            for (int k = 0; k < 3; ++k) m(3 * j + k, 3 * jj + k) = a(j, jj);
    return m;
}

Matrix9cd right_factor(const Matrix3cd& b) {
    Matrix9cd m = Matrix9cd::Zero();
    for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k)
            for (int kk = 0; kk < 3; ++kk) m(3 * j + k, 3 * j + kk) = b(k, kk);
    return m;
}

Vector9cd reference_vector() { return vec(Matrix3cd::Identity()) / std::sqrt(3.0); }

Matrix3cd b_operator(const DensityMatrix& rho, double negative_slack) {
    if (hermiticity_deviation(rho) > 1e-10 * std::max(1.0, rho.norm())) {
        throw DomainError("b-operator needs a Hermitian density matrix");
    }
    Eigen::SelfAdjointEigenSolver<Matrix3cd> es(hermitize(rho));
    Eigen::Vector3d ev = es.eigenvalues();
    for (int i = 0; i < 3; ++i) {
        if (ev[i] < -negative_slack) {
            std::ostringstream msg;
            msg << "b-operator needs a PSD density matrix (eigenvalue " << ev[i] << ")";
            throw DomainError(msg.str());
        }
        ev[i] = ev[i] < 0.0 ? 0.0 : std::sqrt(ev[i]);
    }
    const Matrix3cd root = es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
    return std::sqrt(3.0) * root.transpose();
}

Eigen::Matrix3d x_sigma(const SystemParams& p) {
    const double q = std::exp(-p.beta * p.gap());
    const double z0 = q + 2.0;
    const double zs = q + 2.0 * std::cosh(0.5 * p.beta * p.sigma);
    const double s = std::sqrt(z0 / zs);
    const double x = 0.25 * p.beta * p.sigma;
    return Eigen::Vector3d(s, s * std::exp(-x), s * std::exp(x)).asDiagonal();
}

double trace_norm(const Matrix3cd& m, double tol) {
    if (hermiticity_deviation(m) > tol * std::max(1.0, m.norm())) {
        throw DomainError("trace norm is defined here for Hermitian matrices only");
    }
    Eigen::SelfAdjointEigenSolver<Matrix3cd> es(hermitize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double manifold_p_max(double beta, double gap) { return 1.0 / (std::exp(beta * gap) + 1.0); }

double manifold_alpha(double p, double beta, double gap) {
    return 0.5 * ((2.0 * std::exp(beta * gap) + 1.0) * p - 1.0);
}

namespace {

DensityMatrix block_state(double p, double alpha) {
    DensityMatrix r = DensityMatrix::Zero();
    r(0, 0) = p;
    r(1, 1) = r(2, 2) = 0.5 * (1.0 - p);
    r(1, 2) = r(2, 1) = alpha;
    return r;
}

} // namespace

DensityMatrix manifold_state(double p, double beta, double gap) {
    const double pmax = manifold_p_max(beta, gap);
    // A few ulps of slack so p_max computed elsewhere is accepted.
    if (!(p >= 0.0) || p > pmax * (1.0 + 1e-14)) {
        std::ostringstream msg;
        msg << "manifold parameter p=" << p << " outside [0, " << pmax << "]";
        throw DomainError(msg.str());
    }
    return block_state(p, manifold_alpha(p, beta, gap));
}

std::optional<double> manifold_membership(const DensityMatrix& rho, double beta, double gap,
                                          double tol) {
    const double p = rho(0, 0).real();
    if (p < 0.0 || p > manifold_p_max(beta, gap)) return std::nullopt;
    const double d = trace_norm(hermitize(rho) - manifold_state(p, beta, gap));
    if (d > tol) return std::nullopt;
    return p;
}

double final_population(const DensityMatrix& rho0, double beta, double gap) {
    return (1.0 + rho0(0, 0).real() + 2.0 * rho0(1, 2).real()) /
           (2.0 * (std::exp(beta * gap) + 1.0));
}

DensityMatrix final_state_formula(const DensityMatrix& rho0, double beta, double gap) {
    const double p = final_population(rho0, beta, gap);
    return block_state(p, manifold_alpha(p, beta, gap));
}

Eigen::Matrix<cd, 9, 5> psi_basis() {
    const double h = 0.5;
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix<cd, 9, 5> m = Eigen::Matrix<cd, 9, 5>::Zero();
    // indices: φ11=0, φ22=4, φ23=5, φ32=7, φ33=8
    m(0, 0) = 1.0;
    m(4, 1) = m(5, 1) = m(7, 1) = m(8, 1) = h;
    m(4, 2) = m(8, 2) = h;
    m(5, 2) = m(7, 2) = -h;
    m(5, 3) = r;
    m(7, 3) = -r;
    m(4, 4) = r;
    m(8, 4) = -r;
    return m;
}

Eigen::Matrix<cd, 9, 2> sector_plus_basis() {
    Eigen::Matrix<cd, 9, 2> m = Eigen::Matrix<cd, 9, 2>::Zero();
    m(1, 0) = 1.0;
    m(2, 1) = 1.0;
    return m;
}

Eigen::Matrix<cd, 9, 2> sector_minus_basis() {
    Eigen::Matrix<cd, 9, 2> m = Eigen::Matrix<cd, 9, 2>::Zero();
    m(3, 0) = 1.0;
    m(6, 1) = 1.0;
    return m;
}

} // namespace lambda_dyn
