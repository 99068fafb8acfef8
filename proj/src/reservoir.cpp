// reservoir.cpp — Spectral density, PV constants and the correlation function

#include "lambda_dyn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn {

namespace {

constexpr double pi = std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

// x / (1 - e^{-b x}) and x / (e^{b x} - 1), both regular at x = 0 with limit 1/b.
double x_over_one_minus_exp(double b, double x) {
    const double bx = b * x;
    if (std::abs(bx) < 1e-300) return 1.0 / b;
    return x / -std::expm1(-bx);
}

double x_over_expm1(double b, double x) {
    const double bx = b * x;
    if (std::abs(bx) < 1e-300) return 1.0 / b;
    return x / std::expm1(bx);
}

// Smooth part of the radial weight: W A² r^{2n} e^{-(r/κ0)^m}.
double smooth_weight(const FormFactor& ff, double r) {
    const double x = r / ff.cutoff;
    const double cut = ff.cutoff_exponent == 1 ? std::exp(-x) : std::exp(-x * x);
    const double pw = ff.n == 0 ? 1.0 : std::pow(r, 2 * ff.n);
    return ff.angular_weight * ff.amplitude * ff.amplitude * pw * cut;
}

// Distance beyond which e^{-(r/κ0)^m} r^k is negligible for all our integrands.
double tail_start(const FormFactor& ff, double beta, double gap) {
    return gap + 10.0 * std::max(ff.cutoff, 1.0 / beta);
}

quad::Options tight(double rel) {
    quad::Options o;
    o.rel_tol = rel;
    o.abs_tol = 0.0;
    o.max_doublings = 16;
    return o;
}

// Integral of a smooth function over [a, inf) split at `split`.
template <class F>
double half_line(F&& f, double a, double split, double scale, const quad::Options& opt) {
    quad::Options o = opt;
    const double inner = split > a ? quad::integrate(f, a, split, o).value : 0.0;
    // The tail is tiny; an absolute floor keeps zero tails from stalling.
    o.abs_tol = std::max(opt.abs_tol, 1e-300);
    const double outer = quad::integrate_to_infinity(f, std::max(a, split), scale, o).value;
    return inner + outer;
}

// ∫_0^U cos(ω u) f(u) du on a fixed panel grid resolving both f and the oscillation.
template <class F>
double cosine_integral(F&& f, double omega, double upper, double base_width,
                       const CorrelationOptions& opt) {
    const auto& gl = quad::GaussLegendre::rule(opt.order);
    double width = base_width;
    if (omega != 0.0) {
        const double period = 2.0 * pi / std::abs(omega);
        width = std::min(width, period * opt.order / opt.samples_per_period);
    }
    const double count = std::ceil(upper / width);
    if (count > static_cast<double>(opt.max_panels)) {
        std::ostringstream msg;
        msg.precision(6);
        const double t_max = 2.0 * pi * opt.order * static_cast<double>(opt.max_panels) /
                             (upper * opt.samples_per_period);
        msg << "oscillatory quadrature needs " << count << " panels (budget "
            << opt.max_panels << "); largest supported |t| is " << t_max;
        throw NumericError(msg.str());
    }
    const int panels = std::max(1, static_cast<int>(count));
    return quad::composite([&](double u) { return std::cos(omega * u) * f(u); }, 0.0, upper,
                           panels, gl);
}

// First u past the peak of `env` where it falls below truncation × peak.
template <class F>
double truncation_point(F&& env, double step, double truncation) {
    double peak = 0.0;
    double u = 0.0;
    for (int k = 0; k < 1000000; ++k) {
        const double v = std::abs(env(u));
        peak = std::max(peak, v);
        if (u > 0.0 && peak > 0.0 && v < truncation * peak) return u;
        if (peak == 0.0 && k > 16) return u;  // identically zero
        u += step;
    }
    throw NumericError("correlation integrand does not decay");
}

void validate_correlation_options(const CorrelationOptions& opt) {
    if (opt.samples_per_period < 40.0) {
        throw DomainError("oscillatory quadrature needs at least 40 samples per period");
    }
}

// Resolution scale of the correlation integrand in u.
double base_width(const FormFactor& ff, double beta) {
    return 0.25 * std::min(ff.cutoff, 1.0 / beta);
}

void require_exponential_family(const FormFactor& ff, const char* what) {
    if (!ff.is_exponential_family()) {
        throw DomainError(std::string(what) + " requires p = -1/2 and m = 1");
    }
}

} // namespace

double FormFactor::radial_sq(double r) const {
    const double x = r / cutoff;
    const double cut = cutoff_exponent == 1 ? std::exp(-x) : std::exp(-x * x);
    return amplitude * amplitude * std::pow(r, 2.0 * radial_power()) * cut;
}

double FormFactor::shell_density(double r) const { return r * smooth_weight(*this, r); }

void FormFactor::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw DomainError("form factor amplitude must be non-negative");
    }
    require_positive(cutoff, "form factor cutoff");
    require_positive(angular_weight, "angular weight");
    if (cutoff_exponent != 1 && cutoff_exponent != 2) {
        throw DomainError("cutoff exponent must be 1 or 2");
    }
    if (n < 0) {
        throw DomainError("radial power index n must be >= 0");
    }
}

double spectral_density(const FormFactor& ff, double omega) {
    if (!(omega >= 0.0)) throw DomainError("spectral density needs omega >= 0");
    ff.validate();
    return 0.5 * pi * ff.shell_density(omega);
}

double angular_weight(const AngularProfile& profile, int polar_points, int azimuth_points) {
    if (polar_points < 2 || azimuth_points < 1) {
        throw DomainError("angular quadrature needs at least 2 polar and 1 azimuthal points");
    }
    const auto& gl = quad::GaussLegendre::rule(polar_points);
    const double dphi = 2.0 * pi / azimuth_points;
    double total = 0.0;
    for (int i = 0; i < polar_points; ++i) {
        const double theta = std::acos(gl.nodes[i]);
        double ring = 0.0;
        for (int k = 0; k < azimuth_points; ++k) {
            ring += std::norm(profile(theta, k * dphi));
        }
        total += gl.weights[i] * ring * dphi;
    }
    return total;
}

double spectral_density_quadrature(const FormFactor& ff, double omega,
                                   const AngularProfile& profile, int polar_points,
                                   int azimuth_points) {
    if (!(omega >= 0.0)) throw DomainError("spectral density needs omega >= 0");
    ff.validate();
    AngularProfile g1 = profile;
    if (!g1) {
        const double c = std::sqrt(ff.angular_weight / (4.0 * pi));
        g1 = [c](double, double) { return std::complex<double>(c, 0.0); };
    }
    const double sphere = angular_weight(g1, polar_points, azimuth_points);
    // ω² |radial(ω)|² written as ω^{2n+1} A² e^{-(ω/κ0)^m} to stay finite at 0.
    const double radial = ff.shell_density(omega) / ff.angular_weight;
    return 0.5 * pi * radial * sphere;
}

double spectral_slope_zero(const FormFactor& ff) {
    ff.validate();
    if (ff.n != 0) return 0.0;
    return 0.5 * pi * ff.angular_weight * ff.amplitude * ff.amplitude;
}

double planck_occupation(double beta, double omega) {
    const double x = beta * omega;
    if (!(x > 0.0)) throw DomainError("Planck occupation needs beta * omega > 0");
    return 1.0 / std::expm1(x);
}

double delta_const(const FormFactor& ff, double beta, double gap) {
    require_positive(beta, "beta");
    require_positive(gap, "gap");
    return 2.0 * spectral_density(ff, gap) / std::expm1(beta * gap);
}

double default_pv_window(const FormFactor& ff, double beta, double gap) {
    return 0.25 * std::min({0.5 * gap, 1.0 / beta, ff.cutoff});
}

double principal_value(const std::function<double(double)>& f, double gap, double window,
                       double tail_scale, const quad::Options& opt) {
    if (!(window > 0.0) || !(window < gap)) {
        throw DomainError("PV window must satisfy 0 < w < gap");
    }
    const double f0 = f(gap);
    auto outside = [&](double r) { return f(r) / (r - gap); };
    auto inside = [&](double r) { return (f(r) - f0) / (r - gap); };
    const double lo = quad::integrate(outside, 0.0, gap - window, opt).value;
    // Symmetric window: the analytic log(w / w) term of the subtraction vanishes.
    const double mid = quad::integrate(inside, gap - window, gap + window, opt).value;
    const double split = gap + window + 10.0 * tail_scale;
    const double hi = half_line(outside, gap + window, split, tail_scale, opt);
    return lo + mid + hi;
}

double vartheta_const(const FormFactor& ff, double beta, double gap,
                      const PrincipalValueOptions& opt) {
    require_positive(beta, "beta");
    require_positive(gap, "gap");
    ff.validate();
    if (ff.amplitude == 0.0) return 0.0;

    const quad::Options q = tight(opt.rel_tol);
    const double scale = ff.cutoff;

    // (1 + μ) r² W|radial|² = W A² r^{2n} e^{..} · r / (1 - e^{-βr})
    auto first = [&](double r) {
        return smooth_weight(ff, r) * x_over_one_minus_exp(beta, r) / (r + gap);
    };
    const double direct = half_line(first, 0.0, tail_start(ff, beta, gap), scale, q);

    // μ r² W|radial|² = W A² r^{2n} e^{..} · r / (e^{βr} - 1)
    std::function<double(double)> thermal = [&](double r) {
        return smooth_weight(ff, r) * x_over_expm1(beta, r);
    };
    const double w = opt.window > 0.0 ? opt.window : default_pv_window(ff, beta, gap);
    const double pv = principal_value(thermal, gap, w, scale, q);
    const double pv_half = principal_value(thermal, gap, 0.5 * w, scale, q);
    if (std::abs(pv - pv_half) > opt.window_tol * std::max(std::abs(pv), 1e-300)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << "principal value unstable under window halving: w=" << w << " gives " << pv
            << ", w/2 gives " << pv_half;
        throw NumericError(msg.str());
    }
    return 0.5 * direct - 0.5 * pv_half;
}

double eta_real(const FormFactor& ff, const quad::Options& opt) {
    ff.validate();
    if (ff.amplitude == 0.0) return 0.0;
    // ½ ∫ r² W|radial|² / r dr = ½ ∫ W A² r^{2n} e^{-(r/κ0)^m} dr
    quad::Options q = opt;
    q.abs_tol = 0.0;
    auto f = [&](double r) { return smooth_weight(ff, r); };
    return 0.5 * half_line(f, 0.0, 10.0 * ff.cutoff * (1 + ff.n), ff.cutoff, q);
}

std::complex<double> eta_const(const FormFactor& ff, double beta) {
    require_positive(beta, "beta");
    return {eta_real(ff), -spectral_slope_zero(ff) / beta};
}

double thermal_form_factor(const FormFactor& ff, double beta, double u) {
    require_positive(beta, "beta");
    if (u == 0.0) throw DomainError("thermal form factor is evaluated at u != 0");
    ff.validate();
    // (u / (1 - e^{-βu})) |u| W |radial(|u|)|² with |u| |radial|² = A² |u|^{2n} e^{..}
    return x_over_one_minus_exp(beta, u) * smooth_weight(ff, std::abs(u));
}

double correlation(const FormFactor& ff, double beta, double t, const CorrelationOptions& opt) {
    require_positive(beta, "beta");
    ff.validate();
    validate_correlation_options(opt);
    if (ff.amplitude == 0.0) return 0.0;
    // Even part of the integrand: r² W|radial|² coth(βr/2), with r coth(βr/2) = r + 2r/(e^{βr}-1).
    auto env = [&](double u) { return smooth_weight(ff, u) * (u + 2.0 * x_over_expm1(beta, u)); };
    const double width = base_width(ff, beta);
    const double upper = truncation_point(env, width, opt.truncation);
    return 0.5 * cosine_integral(env, t, upper, width, opt);
}

double correlation_max_time(const FormFactor& ff, double beta, const CorrelationOptions& opt) {
    require_positive(beta, "beta");
    ff.validate();
    validate_correlation_options(opt);
    FormFactor unit = ff;
    unit.amplitude = 1.0;
    auto env = [&](double u) {
        return smooth_weight(unit, u) * (u + 2.0 * x_over_expm1(beta, u));
    };
    const double width = base_width(ff, beta);
    const double upper = truncation_point(env, width, opt.truncation);
    if (std::ceil(upper / width) > static_cast<double>(opt.max_panels)) return 0.0;
    return 2.0 * pi * opt.order * static_cast<double>(opt.max_panels) /
           (upper * opt.samples_per_period);
}

CorrelationPieces correlation_closed(const FormFactor& ff, double beta, double t) {
    require_positive(beta, "beta");
    ff.validate();
    require_exponential_family(ff, "closed-form correlation");
    const double bk = beta * ff.cutoff;
    const double tk2 = (t * ff.cutoff) * (t * ff.cutoff);
    CorrelationPieces out;
    out.t1 = bk * bk * (1.0 - tk2) / ((1.0 + tk2) * (1.0 + tk2));
    out.t2 = 2.0 * bk * (bk + 1.0) / ((bk + 1.0) * (bk + 1.0) + tk2);
    return out;
}

CorrelationPieces correlation_pieces_quadrature(const FormFactor& ff, double beta, double t,
                                                const CorrelationOptions& opt) {
    require_positive(beta, "beta");
    ff.validate();
    require_exponential_family(ff, "correlation decomposition");
    validate_correlation_options(opt);
    // Dimensionless variable v = βu; the cutoff becomes βκ0.
    const double c = 1.0 / (beta * ff.cutoff);
    auto vac = [&](double v) { return v * std::exp(-c * v); };
    auto th = [&](double v) { return 2.0 * x_over_expm1(1.0, v) * std::exp(-c * v); };
    const double width = 0.25 * std::min(1.0, beta * ff.cutoff);
    CorrelationPieces out;
    out.t1 = cosine_integral(vac, t / beta, truncation_point(vac, width, opt.truncation), width,
                             opt);
    out.t2 = cosine_integral(th, t / beta, truncation_point(th, width, opt.truncation), width,
                             opt);
    return out;
}

CorrelationFit fit_correlation_time(const FormFactor& ff, double beta, int samples) {
    require_positive(beta, "beta");
    ff.validate();
    require_exponential_family(ff, "correlation-time fit");
    if (samples < 8) throw DomainError("correlation-time fit needs at least 8 samples");

    const double t_end = 10.0 / ff.cutoff;
    std::vector<double> ts(samples), cs(samples);
    for (int i = 0; i < samples; ++i) {
        ts[i] = t_end * i / (samples - 1);
        cs[i] = correlation(ff, beta, ts[i]);
    }
    const double c0 = std::abs(cs[0]);
    if (!(c0 > 0.0)) throw NumericError("correlation-time fit: flat correlation signal");

    // For trial τ, the amplitude enters linearly and is eliminated in closed form.
    auto misfit = [&](double log_tau, double* amp) {
        FormFactor trial = ff;
        trial.cutoff = std::exp(-log_tau);
        double ss = 0.0, cs_dot = 0.0;
        std::vector<double> shape(samples);
        for (int i = 0; i < samples; ++i) {
            const auto p = correlation_closed(trial, beta, ts[i]);
            shape[i] = p.t1 + p.t2;
            ss += shape[i] * shape[i];
            cs_dot += shape[i] * cs[i];
        }
        const double a = cs_dot / ss;
        double r = 0.0;
        for (int i = 0; i < samples; ++i) {
            const double d = cs[i] - a * shape[i];
            r += d * d;
        }
        if (amp) *amp = a;
        return r;
    };

    // Coarse scan over two decades, then golden-section refinement.
    const double centre = std::log(1.0 / ff.cutoff);
    const int scan = 81;
    double best_x = centre, best_r = std::numeric_limits<double>::infinity();
    const double span = std::log(10.0);
    for (int i = 0; i < scan; ++i) {
        const double x = centre - span + 2.0 * span * i / (scan - 1);
        const double r = misfit(x, nullptr);
        if (r < best_r) {
            best_r = r;
            best_x = x;
        }
    }
    const double step = 2.0 * span / (scan - 1);
    double a = best_x - step, b = best_x + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = misfit(x1, nullptr), f2 = misfit(x2, nullptr);
    while (b - a > 1e-10) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = misfit(x1, nullptr);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = misfit(x2, nullptr);
        }
    }
    CorrelationFit fit;
    const double x = 0.5 * (a + b);
    const double r = misfit(x, &fit.amplitude);
    fit.tau = std::exp(x);
    fit.residual = std::sqrt(r / samples) / c0;
    if (!(fit.amplitude > 0.0)) throw NumericError("correlation-time fit degenerate");
    return fit;
}

double correlation_time(const FormFactor& ff, double beta) {
    return fit_correlation_time(ff, beta).tau;
}

ReservoirConstants reservoir_constants(const FormFactor& ff, double beta, double gap,
                                       const PrincipalValueOptions& opt) {
    ReservoirConstants rc;
    rc.beta = beta;
    rc.gap = gap;
    rc.j_gap = spectral_density(ff, gap);
    rc.j_tilde0 = spectral_slope_zero(ff);
    rc.delta = delta_const(ff, beta, gap);
    rc.vartheta = vartheta_const(ff, beta, gap, opt);
    rc.eta = eta_const(ff, beta);
    return rc;
}

} // namespace lambda_dyn
