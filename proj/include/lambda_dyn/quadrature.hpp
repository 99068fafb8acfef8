// quadrature.hpp — Composite Gauss–Legendre rules with panel doubling
//
// All integrators here are deterministic: a fixed refinement schedule
// (panel count doubles) is run until two successive estimates agree.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn::quad {

// n-point Gauss–Legendre rule on [-1, 1], built once per n by Golub–Welsch.
struct GaussLegendre {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;

    static const GaussLegendre& rule(int n);
};

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-300;
    int order = 16;          // Gauss–Legendre points per panel
    int initial_panels = 4;
    int max_doublings = 14;
};

struct Estimate {
    double value = 0.0;
    double previous = 0.0;   // estimate at half the panel count
    int panels = 0;
};

// Sum of the rule over `panels` equal panels of [a, b].
template <class F>
double composite(F&& f, double a, double b, int panels, const GaussLegendre& gl) {
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < gl.nodes.size(); ++k) {
            acc += gl.weights[k] * f(mid + 0.5 * h * gl.nodes[k]);
        }
        total += 0.5 * h * acc;
    }
    return total;
}

inline bool converged(double fine, double coarse, const Options& opt) {
    const double diff = std::abs(fine - coarse);
    return diff <= opt.rel_tol * std::abs(fine) || diff <= opt.abs_tol;
}

// Finite interval, panel count doubling until successive estimates agree.
template <class F>
Estimate integrate(F&& f, double a, double b, const Options& opt = {}) {
    const auto& gl = GaussLegendre::rule(opt.order);
    int panels = opt.initial_panels;
    double coarse = composite(f, a, b, panels, gl);
    for (int d = 0; d < opt.max_doublings; ++d) {
        panels *= 2;
        const double fine = composite(f, a, b, panels, gl);
        if (converged(fine, coarse, opt)) {
            return {fine, coarse, panels};
        }
        coarse = fine;
    }
    throw NumericError("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                       "] did not converge after " + std::to_string(panels) + " panels");
}

// [a, inf) through r = a + scale * s / (1 - s), s in [0, 1).
template <class F>
Estimate integrate_to_infinity(F&& f, double a, double scale, const Options& opt = {}) {
    auto mapped = [&](double s) {
        const double one_minus = 1.0 - s;
        const double r = a + scale * s / one_minus;
        const double jac = scale / (one_minus * one_minus);
        const double v = f(r);
        // Far tail: the integrand underflows before the jacobian overflows.
        return v == 0.0 ? 0.0 : v * jac;
    };
    return integrate(mapped, 0.0, 1.0, opt);
}

} // namespace lambda_dyn::quad
