// dynamics.hpp — Resonance propagator, improved reduced dynamics and trajectories
//
//   U(t) = Σ_{j,s} e^{itε_j^(s)} P_j^(s)
//   [T_t(ρ)]_kl = ⟨ψ_S, (1⊗b) U(t) (X_σ|φ_l⟩⟨φ_k|X_σ ⊗ 1) ψ_ref⟩

#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lambda_dyn/reservoir.hpp"
#include "lambda_dyn/resonance.hpp"
#include "lambda_dyn/system.hpp"

namespace lambda_dyn {

class Propagator {
public:
    explicit Propagator(ResonanceSet set);

    Matrix9cd matrix(double t) const;
    // Single e^{itε_j^(s)} P_j^(s) contribution.
    Matrix9cd term(int sector, int index, double t) const;
    // t → ∞ limit: the projections of exactly-zero energies.
    Matrix9cd limit() const;

    const ResonanceSet& resonances() const { return set_; }

private:
    ResonanceSet set_;
    std::vector<Matrix9cd> projections_;  // embedded, same order as set_.data
};

struct Evolved {
    DensityMatrix rho;                  // Hermitized
    double hermiticity_deviation = 0.0; // ‖T - Tᴴ‖_F before Hermitization
    double trace_deviation = 0.0;       // |Tr T - 1|
    double min_eigenvalue = 0.0;
};

// Positivity is monitored, not enforced.
constexpr double kPositivityWarning = -1e-6;
constexpr double kHermiticityLimit = 1e-8;

// Matrix [⟨ψ_S, (1⊗b) V (X|φ_l⟩⟨φ_k|X ⊗ 1) ψ_ref⟩]_kl for an arbitrary 9×9 V.
Matrix3cd contract(const DensityMatrix& rho0, const Eigen::Matrix3d& x, const Matrix9cd& v);

Evolved evolve(const DensityMatrix& rho0, const SystemParams& p, double t, const Propagator& u);

// α_t(A) with U(t)(A⊗1)ψ_ref = (α_t(A)⊗1)ψ_ref.
Matrix3cd heisenberg(const Matrix3cd& a, double t, const Propagator& u);

// The (j, s) term of the dynamics, not Hermitized.
Matrix3cd evolve_term(const DensityMatrix& rho0, const SystemParams& p, double t,
                      const Propagator& u, int sector, int index);

// σ > 0: ρ_{β,σ}; σ = 0: the two zero-energy projections, reproducing the final-state formula.
DensityMatrix final_state_limit(const DensityMatrix& rho0, const SystemParams& p,
                                const Propagator& u);

// Geometric grid on [1e-2 t1, 50 t2] (σ = 0: [1e-2 t1, 1e4 t1]).
std::vector<double> default_time_grid(const SystemParams& p, int points = 400);
std::vector<double> geometric_grid(double t_lo, double t_hi, int points);
void validate_time_grid(const std::vector<double>& times);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::vector<double> dist_gibbs;   // to ρ_{β,σ}
    std::vector<double> dist_qstat;   // to the quasi-stationary state of ρ0
    std::vector<double> dist_final;   // to the propagator's t → ∞ limit
    std::vector<double> p_donor;      // [T_t(ρ0)]11
    std::vector<double> min_eig;
    std::vector<double> hermiticity_deviation;
    std::vector<double> trace_deviation;

    std::size_t size() const { return times.size(); }
    double max_hermiticity_deviation() const;
    double max_trace_deviation() const;
    double lowest_eigenvalue() const;
};

// threads = 0 picks the hardware concurrency.
Trajectory trajectory(const DensityMatrix& rho0, const SystemParams& p, const Propagator& u,
                      const std::vector<double>& times, unsigned threads = 0);

enum class Channel { Gibbs, QuasiStationary, Final, Donor };

// -slope of the least-squares line through log(value) on t ∈ [t_lo, t_hi].
double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi);
double fit_decay_rate(const Trajectory& traj, Channel channel, double t_lo, double t_hi);

// Diagonal initial state ([ρ0]11 = p_D0, remaining weight split equally unless given).
DensityMatrix donor_state(double p_d0, std::optional<double> p2 = std::nullopt,
                          std::optional<double> p3 = std::nullopt);
double donor_probability(const SystemParams& p, double p_d0, double t, const Propagator& u,
                         std::optional<double> p2 = std::nullopt,
                         std::optional<double> p3 = std::nullopt);

struct Observation {
    double p = 0.0;        // population at t
    double p_qstat = 0.0;  // plateau value
    double p_final = 0.0;  // t → ∞
    double gamma = 0.0;    // rate constant used
    bool in_window = true; // t ≥ 5/λ²
};

// p(t) = (1+2e^{βΔ})^{-1} + e^{-γσ²t/λ²} / (2e^{βΔ}+3+e^{-βΔ}) for ρ0 = |φ1⟩⟨φ1|.
Observation observation_curve(const SystemParams& p, const ReservoirConstants& rc, double t);

struct TimescaleReport {
    double t1 = 0.0;
    double t2 = std::numeric_limits<double>::infinity();
    double ratio = std::numeric_limits<double>::infinity();  // t2 / t1 = λ⁴/σ²
    double fast_rate = 0.0;  // λ² γ_deg
    double slow_rate = 0.0;  // σ²/λ² γ_nd
    bool regime_ok = false;
};

TimescaleReport timescale_report(const SystemParams& p, const ReservoirConstants& rc);

const char* channel_name(Channel c);

} // namespace lambda_dyn
