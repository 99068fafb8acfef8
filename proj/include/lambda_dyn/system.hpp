// system.hpp — Three-level Λ-system algebra and its Liouville-space embedding
//
// Energy basis {φ1, φ2, φ3}: φ1 the isolated level E0, φ2/φ3 the split pair
// E ± σ/2. Liouville vectors use the row-major product basis φ_jk = φ_j ⊗ φ_k
// at index 3j + k (0-based), so vec(A)[3j + k] = A(j, k).

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>

namespace lambda_dyn {

using cd = std::complex<double>;
using Matrix3cd = Eigen::Matrix3cd;
using Vector3cd = Eigen::Vector3cd;
using Vector9cd = Eigen::Matrix<cd, 9, 1>;
using Matrix9cd = Eigen::Matrix<cd, 9, 9>;

// 3×3 complex Hermitian, unit trace, PSD up to small slack.
using DensityMatrix = Matrix3cd;

struct SystemParams {
    double E0 = 1.0;
    double E = 0.0;
    double sigma = 0.0;
    double beta = 1.0;
    double lambda = 0.0;
    cd gamma_coupling{1.0, 0.0};

    double gap() const { return E0 - E; }
    double lambda_sq() const { return lambda * lambda; }

    // σ < λ² < Δ; reported, never enforced.
    bool regime_ok() const { return sigma < lambda_sq() && lambda_sq() < gap(); }

    // Throws DomainError unless Δ > 0, σ >= 0, β > 0 and all values finite.
    void validate() const;
};

struct DensityTolerance {
    double hermitian = 1e-12;
    double trace = 1e-12;
    double negative = 1e-10;
};

// Throws DomainError describing the first violated density-matrix property.
void validate_density(const DensityMatrix& rho, const DensityTolerance& tol = {});

double hermiticity_deviation(const Matrix3cd& m);
double min_eigenvalue(const Matrix3cd& m);
Matrix3cd hermitize(const Matrix3cd& m);

// diag(E0, E + σ/2, E - σ/2)
Eigen::Matrix3d hamiltonian(const SystemParams& p);

// First row (0, 1, γ), first column (0, 1, γ̄), zero lower block.
Matrix3cd coupling_matrix(cd gamma = {1.0, 0.0});

// e^{-βH(σ)} / Z with energies measured from E.
DensityMatrix gibbs(double beta, double gap, double sigma);
inline DensityMatrix gibbs(const SystemParams& p) { return gibbs(p.beta, p.gap(), p.sigma); }

// (γφ2 - φ3) / sqrt(1 + |γ|²), annihilated by G_γ.
Vector3cd dark_state(cd gamma = {1.0, 0.0});
DensityMatrix dark_density(cd gamma = {1.0, 0.0});

// Row-major vectorisation and its inverse.
Vector9cd vec(const Matrix3cd& a);
Matrix3cd unvec(const Vector9cd& v);

// A ⊗ 1 and 1 ⊗ B on the product basis.
Matrix9cd left_multiplication(const Matrix3cd& a);
Matrix9cd right_factor(const Matrix3cd& b);

// ψ_ref = (φ11 + φ22 + φ33) / √3
Vector9cd reference_vector();

// √3 · transpose(ρ^{1/2}); eigenvalues in [-1e-10, 0) are clamped to 0.
Matrix3cd b_operator(const DensityMatrix& rho, double negative_slack = 1e-10);

// √(Z0/Zσ) · diag(1, e^{-βσ/4}, e^{βσ/4}), mapping ρ_{β,0} to ρ_{β,σ}.
Eigen::Matrix3d x_sigma(const SystemParams& p);

// Sum of |eigenvalues|; DomainError if M is not Hermitian to `tol`·max(1, ‖M‖).
double trace_norm(const Matrix3cd& m, double tol = 1e-10);

// Upper end (e^{βΔ} + 1)^{-1} of the invariant manifold.
double manifold_p_max(double beta, double gap);

// α = ½((2e^{βΔ} + 1)p - 1)
double manifold_alpha(double p, double beta, double gap);

// diag block (p, [[(1-p)/2, α], [α, (1-p)/2]]) for p ∈ [0, p_max].
DensityMatrix manifold_state(double p, double beta, double gap);

// [ρ]11 when ρ lies on the manifold to `tol` in trace norm.
std::optional<double> manifold_membership(const DensityMatrix& rho, double beta, double gap,
                                          double tol = 1e-8);

// p_∞ = (1 + [ρ0]11 + 2 Re[ρ0]23) / (2(e^{βΔ} + 1))
double final_population(const DensityMatrix& rho0, double beta, double gap);

// σ = 0 limit state; the same matrix is the σ > 0 plateau.
DensityMatrix final_state_formula(const DensityMatrix& rho0, double beta, double gap);
inline DensityMatrix quasi_stationary(const DensityMatrix& rho0, double beta, double gap) {
    return final_state_formula(rho0, beta, gap);
}

// Columns Ψ1..Ψ5 of the zero-frequency sector in product coordinates:
// φ11, ν⊗ν, τ⊗τ, (φ23 - φ32)/√2, (φ22 - φ33)/√2 with ν, τ = (φ2 ± φ3)/√2.
Eigen::Matrix<cd, 9, 5> psi_basis();

// Product-basis columns of the ±Δ sectors: {φ12, φ13} and {φ21, φ31}.
Eigen::Matrix<cd, 9, 2> sector_plus_basis();
Eigen::Matrix<cd, 9, 2> sector_minus_basis();

} // namespace lambda_dyn
