// reservoir.hpp — Bath-derived constants for the radial form-factor family
//
//   g(r, Σ) = A r^p exp(-(r/κ0)^m / 2) g1(Σ),  p = -1/2 + n,  m ∈ {1, 2}
//
// Every quantity below depends on g only through radial moments and the
// angular weight W = ∫_{S²} |g1|² dΣ (4π for isotropic coupling).

#pragma once

#include <complex>
#include <functional>
#include <numbers>

#include "lambda_dyn/quadrature.hpp"

namespace lambda_dyn {

struct FormFactor {
    double amplitude = 1.0;                       // A
    int n = 0;                                    // radial power p = -1/2 + n
    int cutoff_exponent = 1;                      // m
    double cutoff = 1.0;                          // κ0
    double angular_weight = 4.0 * std::numbers::pi;  // W

    double radial_power() const { return -0.5 + n; }

    // |radial(r)|² = A² r^{2p} exp(-(r/κ0)^m)
    double radial_sq(double r) const;

    // r² W |radial(r)|² = W A² r^{2n+1} exp(-(r/κ0)^m); regular at r = 0.
    double shell_density(double r) const;

    // Throws DomainError unless A >= 0, κ0 > 0, W > 0, m ∈ {1,2}, n >= 0.
    void validate() const;

    // p = -1/2, m = 1: the family with closed-form correlation pieces.
    bool is_exponential_family() const { return n == 0 && cutoff_exponent == 1; }
};

// Angular dependence g1(θ, φ) used by the spherical quadrature path.
using AngularProfile = std::function<std::complex<double>(double theta, double phi)>;

// J(ω) = ½ π ω² W |radial(ω)|²
double spectral_density(const FormFactor& ff, double omega);

// Same quantity with ∫_{S²}|g(ω, Σ)|² dΣ done by product Gauss–Legendre
// (cos θ) × trapezoid (φ) quadrature. With no profile the isotropic
// factor sqrt(W / 4π) is used.
double spectral_density_quadrature(const FormFactor& ff, double omega,
                                   const AngularProfile& profile = {},
                                   int polar_points = 24, int azimuth_points = 32);

// ∫_{S²} |g1|² dΣ by the same product rule.
double angular_weight(const AngularProfile& profile, int polar_points = 24,
                      int azimuth_points = 32);

// J̃(0) = lim_{ω→0+} J(ω)/ω
double spectral_slope_zero(const FormFactor& ff);

// μ_β(ω) = 1 / (e^{βω} - 1)
double planck_occupation(double beta, double omega);

// δ = 2 J(Δ) / (e^{βΔ} - 1)
double delta_const(const FormFactor& ff, double beta, double gap);

struct PrincipalValueOptions {
    double window = 0.0;     // half-width w of the subtraction window; 0 selects the default
    double rel_tol = 1e-10;  // panel-doubling agreement
    double window_tol = 1e-6;  // agreement between windows w and w/2
};

// min(Δ/2, 1/β, κ0) / 4
double default_pv_window(const FormFactor& ff, double beta, double gap);

// PV ∫_0^∞ f(r) / (r - Δ) dr with the symmetric window [Δ - w, Δ + w].
double principal_value(const std::function<double(double)>& f, double gap, double window,
                       double tail_scale, const quad::Options& opt);

// ϑ = ½∫(1+μ)|g|²/(|k|+Δ) d³k - ½ PV∫ μ|g|²/(|k|-Δ) d³k
double vartheta_const(const FormFactor& ff, double beta, double gap,
                      const PrincipalValueOptions& opt = {});

// Re η = ½ ∫ |g(k)|²/|k| d³k
double eta_real(const FormFactor& ff, const quad::Options& opt = {1e-12});

// η = Re η - i J̃(0)/β
std::complex<double> eta_const(const FormFactor& ff, double beta);

// ∫_{S²}|g_β(u, Σ)|² dΣ for the positive-temperature form factor, u ≠ 0.
double thermal_form_factor(const FormFactor& ff, double beta, double u);

struct CorrelationOptions {
    int order = 16;
    double samples_per_period = 64.0;  // at least 40 required
    double truncation = 1e-14;         // relative to the integrand envelope peak
    long max_panels = 1L << 20;
};

// C(t) = ½ Re ∫_ℝ e^{-iut} u²/|1-e^{-βu}| W|radial(|u|)|² du
double correlation(const FormFactor& ff, double beta, double t,
                   const CorrelationOptions& opt = {});

// Largest |t| the oscillatory grid accepts under the panel budget.
double correlation_max_time(const FormFactor& ff, double beta,
                            const CorrelationOptions& opt = {});

// Two pieces of C(t) β² / (½ W A²) in the exponential family.
struct CorrelationPieces {
    double t1 = 0.0;  // vacuum piece
    double t2 = 0.0;  // thermal piece
};

// Closed forms T1 (exact) and T2 (with u/(1-e^{-u}) ≈ 1).
CorrelationPieces correlation_closed(const FormFactor& ff, double beta, double t);

// T1 and T2 integrated numerically, T2 without the approximation.
CorrelationPieces correlation_pieces_quadrature(const FormFactor& ff, double beta, double t,
                                                const CorrelationOptions& opt = {});

struct CorrelationFit {
    double tau = 0.0;        // fitted decay time
    double amplitude = 0.0;  // multiplier of the closed-form shape
    double residual = 0.0;   // rms misfit / C(0)
};

// Least-squares fit of the rational envelope (T1 + T2 closed forms, κ0 → 1/τ)
// to the quadrature C(t) on t ∈ [0, 10/κ0].
CorrelationFit fit_correlation_time(const FormFactor& ff, double beta, int samples = 201);

double correlation_time(const FormFactor& ff, double beta);

// Derived bath quantities at fixed (β, Δ).
struct ReservoirConstants {
    double beta = 1.0;
    double gap = 1.0;
    double j_gap = 0.0;      // J(Δ)
    double j_tilde0 = 0.0;   // J̃(0)
    double delta = 0.0;      // δ
    double vartheta = 0.0;   // ϑ
    std::complex<double> eta{0.0, 0.0};

    double eta_re() const { return eta.real(); }

    // The only ξ-combinations the level shift operators use.
    std::complex<double> xi_tilde_plus_xi_minus() const { return {0.0, -delta}; }
    std::complex<double> xi_plus_xi_tilde_minus() const {
        return {0.0, -std::exp(beta * gap) * delta};
    }
    double xi_minus_minus_xi_tilde() const { return 2.0 * vartheta; }
};

ReservoirConstants reservoir_constants(const FormFactor& ff, double beta, double gap,
                                       const PrincipalValueOptions& opt = {});

} // namespace lambda_dyn
