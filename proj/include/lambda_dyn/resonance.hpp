// resonance.hpp — Level shift operators and the nine-resonance spectral data
//
// Sector 0 acts on the Ψ basis (see system.hpp), sector +1 on {φ12, φ13},
// sector -1 on {φ21, φ31}. The sector -1 operator is the antiunitary image
// -JΛ_ΔJ of sector +1, realised as elementwise -conj in the paired basis.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "lambda_dyn/eigen_small.hpp"
#include "lambda_dyn/reservoir.hpp"
#include "lambda_dyn/system.hpp"

namespace lambda_dyn {

template <class Real>
struct LevelShiftOperators {
    MatrixXc<Real> lambda0;      // 5×5
    MatrixXc<Real> lambda_plus;  // 2×2
    MatrixXc<Real> lambda_minus; // 2×2
};

// B(σ) + A(λ², δ, ϑ, βΔ) on the Ψ basis.
template <class Real>
MatrixXc<Real> build_lambda0(const SystemParams& p, const ReservoirConstants& rc) {
    using C = std::complex<Real>;
    using std::exp;
    using std::sqrt;
    MatrixXc<Real> m = MatrixXc<Real>::Zero(5, 5);
    const Real s = Real(p.sigma) / sqrt(Real(2));
    m(1, 3) = s;
    m(2, 3) = -s;
    m(3, 1) = s;
    m(3, 2) = -s;

    const Real l2 = Real(p.lambda) * Real(p.lambda);
    const Real d = Real(rc.delta);
    const Real eb = exp(Real(p.beta) * Real(p.gap()));
    const C i(0, 1);
    m(0, 0) += i * Real(2) * eb * d * l2;
    m(0, 1) += -i * Real(2) * eb * d * l2;
    m(1, 0) += -i * Real(2) * d * l2;
    m(1, 1) += i * Real(2) * d * l2;
    m(3, 3) += i * d * l2;
    m(4, 4) += i * d * l2;
    m(3, 4) += Real(2) * l2 * Real(rc.vartheta);
    m(4, 3) += Real(2) * l2 * Real(rc.vartheta);
    return m;
}

// Λ_Δ = Δ - 2λ²η + λ²η̄[[1,1],[1,1]] + σ diag(-½, ½) and its -JΛ_ΔJ partner.
template <class Real>
std::pair<MatrixXc<Real>, MatrixXc<Real>> build_lambda_pm(const SystemParams& p,
                                                         const ReservoirConstants& rc) {
    using C = std::complex<Real>;
    const Real l2 = Real(p.lambda) * Real(p.lambda);
    const C eta(Real(rc.eta.real()), Real(rc.eta.imag()));
    const C diag = C(Real(p.gap())) - Real(2) * l2 * eta;
    MatrixXc<Real> plus = MatrixXc<Real>::Constant(2, 2, l2 * std::conj(eta));
    plus(0, 0) += diag - Real(p.sigma) / Real(2);
    plus(1, 1) += diag + Real(p.sigma) / Real(2);
    MatrixXc<Real> minus = -plus.conjugate();
    return {plus, minus};
}

template <class Real>
LevelShiftOperators<Real> level_shift_operators(const SystemParams& p,
                                                const ReservoirConstants& rc) {
    auto [plus, minus] = build_lambda_pm<Real>(p, rc);
    return {build_lambda0<Real>(p, rc), plus, minus};
}

// Exact null pair of Λ0 for every (σ, λ): right (1,1,1,0,0), left (e^{-βΔ},1,1,0,0).
template <class Real>
KnownKernel<Real> lambda0_kernel(double beta, double gap) {
    using std::exp;
    VectorXc<Real> r = VectorXc<Real>::Zero(5), l = VectorXc<Real>::Zero(5);
    r.head(3).setConstant(Real(1));
    l(0) = exp(-Real(beta) * Real(gap));
    l(1) = l(2) = Real(1);
    return {r, l};
}

// The leading-order resonance energies. ε0^(2) is taken as 0 at σ = 0.
template <class Real>
struct PerturbativeEnergies {
    std::array<std::complex<Real>, 5> zero;
    std::array<std::complex<Real>, 2> plus;
    std::array<std::complex<Real>, 2> minus;
};

template <class Real>
PerturbativeEnergies<Real> perturbative_energies(const SystemParams& p,
                                                 const ReservoirConstants& rc) {
    using C = std::complex<Real>;
    using std::exp;
    const C i(0, 1);
    const Real l2 = Real(p.lambda) * Real(p.lambda);
    const Real d = Real(rc.delta), th = Real(rc.vartheta), sg = Real(p.sigma);
    const Real eb = exp(Real(p.beta) * Real(p.gap()));
    const Real q = Real(1) / eb;
    const Real jt = Real(rc.j_tilde0) / Real(p.beta);

    PerturbativeEnergies<Real> e;
    e.zero[0] = C(0);
    e.zero[1] = sg == Real(0)
                    ? C(0)
                    : i * d * (Real(2) + q) * sg * sg /
                          (Real(2) * (Real(1) + q) * (Real(4) * th * th + d * d) * l2);
    e.zero[2] = i * Real(2) * d * l2 * (Real(1) + eb);
    e.zero[3] = i * d * l2 + Real(2) * l2 * th;
    e.zero[4] = i * d * l2 - Real(2) * l2 * th;
    e.plus[0] = C(Real(p.gap()) - Real(2) * l2 * Real(rc.eta.real())) + i * Real(2) * l2 * jt;
    e.plus[1] = C(Real(p.gap())) + i * Real(4) * l2 * jt;
    for (int s = 0; s < 2; ++s) e.minus[s] = -std::conj(e.plus[s]);
    return e;
}

// Leading-order (σ → 0) projections: five 5×5 and two 2×2 per ±1 sector.
struct ClosedFormProjections {
    std::array<Eigen::MatrixXcd, 5> zero;
    std::array<Eigen::MatrixXcd, 2> plus;
    std::array<Eigen::MatrixXcd, 2> minus;
};

ClosedFormProjections closed_form_projections(double beta, double gap);

struct ResonanceDatum {
    int sector = 0;          // -1, 0, +1
    int index = 0;           // 1-based within the sector
    cd energy{0.0, 0.0};
    Eigen::VectorXcd right;  // sector coordinates, unit norm
    Eigen::VectorXcd left;   // sector coordinates, ⟨left, right⟩ = 1

    Eigen::MatrixXcd projection() const { return right * left.adjoint(); }
    Vector9cd right_full() const;
    Vector9cd left_full() const;
};

struct ResonanceSet {
    std::vector<ResonanceDatum> data;  // sector 0 s=1..5, sector +1 s=1,2, sector -1 s=1,2
    double pairing_deviation = 0.0;    // before enforcement
    bool labels_matched = true;        // false when sector 0 fell back to ascending Im ε

    const ResonanceDatum& get(int sector, int index) const;
};

// Product-basis columns spanning a sector.
Eigen::Matrix<cd, 9, Eigen::Dynamic> sector_basis(int sector);
int sector_size(int sector);

ResonanceSet resonance_set(const SystemParams& p, const ReservoirConstants& rc);

// min over Im ε/λ² of the decaying resonances (all but (0,1), (0,2)).
double gamma_deg_exact(const ResonanceSet& set, double lambda);

struct GammaDeg {
    double proposition = 0.0;       // min{δ, 2J̃(0)/β}
    double discussion = 0.0;        // min{J(Δ)/(e^{βΔ}-1), J̃(0)/β}
    double low_temperature = 0.0;   // Δ ≫ T: 2 min{J(Δ)e^{-Δ/T}, T J̃(0)}
    double high_temperature = 0.0;  // Δ ≪ T: 2T min{J(Δ)/Δ, J̃(0)}
};

GammaDeg gamma_deg(const ReservoirConstants& rc);

struct GammaNd {
    double exact = 0.0;             // δ(2+e^{-βΔ}) / (2(1+e^{-βΔ})(4ϑ²+δ²))
    double low_temperature = 0.0;   // Δ ≫ T
    double high_temperature = 0.0;  // Δ ≪ T
};

GammaNd gamma_nd(const ReservoirConstants& rc);

// Im ε0^(2) λ²/σ² read from a numeric set.
double gamma_nd_numeric(const ResonanceSet& set, const SystemParams& p);

} // namespace lambda_dyn
