// acceptance.cpp — Oracle and property checks evaluated at a configured point

#include "lambda_dyn/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "lambda_dyn/dynamics.hpp"
#include "lambda_dyn/errors.hpp"
#include "lambda_dyn/quad_precision.hpp"
#include "lambda_dyn/resonance.hpp"

namespace lambda_dyn {

namespace {

using std::numbers::pi;

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string sci(double x) {
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
}

DensityMatrix level(int k) {
    DensityMatrix r = DensityMatrix::Zero();
    r(k, k) = 1.0;
    return r;
}

DensityMatrix random_density(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix3cd g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = cd(n(rng), n(rng));
    Matrix3cd r = g * g.adjoint();
    return r / r.trace();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    return (std::log(y.back()) - std::log(y.front())) / (std::log(x.back()) - std::log(x.front()));
}

// Collects sub-checks of one criterion into a verdict and a detail line.
class Verdict {
public:
    void check(bool ok, const std::string& what) {
        ok_ = ok_ && ok;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += (ok ? "" : "FAILED ") + what;
    }
    void note(const std::string& what) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += what;
    }
    bool ok() const { return ok_; }
    const std::string& detail() const { return detail_; }

private:
    bool ok_ = true;
    std::string detail_;
};

struct Context {
    AcceptanceSetup setup;
    ReservoirConstants rc;

    SystemParams at_sigma(double sigma) const {
        SystemParams p = setup.params;
        p.sigma = sigma;
        return p;
    }
    Propagator propagator(double sigma) const {
        return Propagator(resonance_set(at_sigma(sigma), rc));
    }
};

void criterion1(const Context& c, Verdict& v) {
    const FormFactor& ff = c.setup.reservoir;
    const double W = ff.angular_weight, A2 = ff.amplitude * ff.amplitude, k = ff.cutoff;
    double worst = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double w = 10.0 * k * i / 20.0;
        const double closed = 0.5 * pi * W * A2 * std::pow(w, 2 * ff.n + 1) *
                              std::exp(-std::pow(w / k, ff.cutoff_exponent));
        worst = std::max(worst, rel(spectral_density_quadrature(ff, w), closed));
    }
    v.check(worst <= 1e-6, "J quadrature max rel err " + sci(worst) + " <= 1e-6");

    const double slope = spectral_slope_zero(ff);
    if (ff.n == 0) {
        const double e = rel(slope, 0.5 * pi * W * A2);
        v.check(e <= 1e-8, "J~(0) rel err " + sci(e) + " <= 1e-8");
    } else {
        v.check(slope == 0.0, "J~(0) = 0 for n > 0");
    }

    const double closed_eta = 0.5 * W * A2 * std::pow(k, 2 * ff.n + 1) *
                              std::tgamma((2.0 * ff.n + 1) / ff.cutoff_exponent) / ff.cutoff_exponent;
    const double e = rel(eta_real(ff), closed_eta);
    v.check(e <= 1e-8, "Re eta rel err " + sci(e) + " <= 1e-8");
}

void criterion2(const Context& c, Verdict& v) {
    std::vector<double> sigmas{1e-5, 1e-6, 1e-7}, err;
    for (double s : sigmas) {
        const SystemParams p = c.at_sigma(s);
        const auto target = perturbative_energies<quad_real>(p, c.rc).zero[1];
        const auto m = build_lambda0<quad_real>(p, c.rc);
        const auto kernel = lambda0_kernel<quad_real>(p.beta, p.gap());
        const auto pairs = eigensolve_small<quad_real>(m, &kernel);
        auto best = pairs[1].value;
        for (std::size_t i = 1; i < pairs.size(); ++i) {
            if (abs(pairs[i].value - target) < abs(best - target)) best = pairs[i].value;
        }
        err.push_back(static_cast<double>(abs(best - target) / abs(target)));
    }
    const double slope = loglog_slope(sigmas, err);
    v.check(std::abs(slope - 2.0) <= 0.3, "eps0^(2) slope " + sci(slope) + " in 2 +- 0.3");
    v.check(err[1] <= 0.01, "eps0^(2) rel err at sigma=1e-6 " + sci(err[1]) + " <= 1%");

    const SystemParams p0 = c.at_sigma(0.0);
    const double l2 = p0.lambda_sq(), d = c.rc.delta, th = c.rc.vartheta;
    const double eb = std::exp(p0.beta * p0.gap());
    const auto set = resonance_set(p0, c.rc);
    const std::vector<cd> expect{0.0, 0.0, cd(0, 2 * d * l2 * (1 + eb)), cd(2 * l2 * th, d * l2),
                                 cd(-2 * l2 * th, d * l2)};
    double worst = 0.0;
    for (int s = 1; s <= 5; ++s) {
        const cd e = set.get(0, s).energy;
        worst = std::max(worst, expect[s - 1] == cd(0.0) ? std::abs(e)
                                                         : std::abs(e - expect[s - 1]) / std::abs(expect[s - 1]));
    }
    v.check(worst <= 1e-10, "sigma=0 sector-0 spectrum rel err " + sci(worst) + " <= 1e-10");

    const auto pert0 = perturbative_energies<double>(p0, c.rc);
    double worst_pm = 0.0;
    for (int s = 1; s <= 2; ++s) {
        worst_pm = std::max(worst_pm, std::abs(set.get(1, s).energy - pert0.plus[s - 1]) /
                                          std::abs(pert0.plus[s - 1]));
        worst_pm = std::max(worst_pm, std::abs(set.get(-1, s).energy - pert0.minus[s - 1]) /
                                          std::abs(pert0.minus[s - 1]));
    }
    v.check(worst_pm <= 1e-10, "sigma=0 sectors +-1 rel err " + sci(worst_pm) + " <= 1e-10");
}

void criterion3(const Context& c, Verdict& v) {
    const SystemParams p = c.setup.params;
    const auto u = c.propagator(p.sigma);
    const double id_err = (u.matrix(0.0) - Matrix9cd::Identity()).norm();
    v.check(id_err <= 1e-10, "||U(0)-1|| " + sci(id_err) + " <= 1e-10");

    const double t1 = 1.0 / (p.lambda_sq() * c.rc.delta);
    const double t2 = p.sigma > 0.0 ? p.lambda_sq() / (p.sigma * p.sigma) : 1e4 * t1;
    const std::vector<double> grid{0.1 * t1, t1, 10.0 * t1, 0.1 * t2, t2};
    double worst = 0.0;
    for (double t : grid)
        for (double s : grid) {
            worst = std::max(worst, (u.matrix(t + s) - u.matrix(t) * u.matrix(s)).norm());
        }
    v.check(worst <= 1e-10, "max ||U(t+s)-U(t)U(s)|| over 5x5 grid " + sci(worst) + " <= 1e-10");
}

void criterion4(const Context& c, Verdict& v) {
    const SystemParams p = c.at_sigma(0.0);
    const auto u = c.propagator(0.0);
    const double pmax = manifold_p_max(p.beta, p.gap());
    const double t1 = 1.0 / (p.lambda_sq() * c.rc.delta);
    double worst = 0.0;
    for (int k = 0; k < 10; ++k) {
        const DensityMatrix rho = manifold_state(pmax * k / 9.0, p.beta, p.gap());
        for (double t : {t1, 100.0 * t1, 1e4 * t1}) {
            worst = std::max(worst, trace_norm(evolve(rho, p, t, u).rho - rho));
        }
    }
    v.check(worst <= 1e-9, "max ||T_t(rho(p)) - rho(p)||_1 " + sci(worst) + " <= 1e-9");
}

void criterion5(const Context& c, Verdict& v) {
    const SystemParams p = c.at_sigma(0.0);
    const auto u = c.propagator(0.0);
    const double t = 200.0 / (p.lambda_sq() * c.rc.delta);
    std::mt19937 rng(20240501);
    double worst = 0.0;
    for (int n = 0; n < 5; ++n) {
        const DensityMatrix r = random_density(rng);
        worst = std::max(worst, trace_norm(evolve(r, p, t, u).rho - final_state_formula(r, p.beta, p.gap())));
    }
    v.check(worst <= 1e-6, "5 random states, max distance to final-state formula " + sci(worst) + " <= 1e-6");
}

void criterion6(const Context& c, Verdict& v) {
    const SystemParams p = c.setup.params;
    const auto u = c.propagator(p.sigma);
    const double gnd = gamma_nd(c.rc).exact;
    const double t_end = 20.0 * p.lambda_sq() / (p.sigma * p.sigma * gnd);
    const DensityMatrix rho_g = gibbs(p);
    double worst = 0.0;
    for (const DensityMatrix& r : {level(0), level(1), DensityMatrix(DensityMatrix::Identity() / 3.0)}) {
        worst = std::max(worst, trace_norm(evolve(r, p, t_end, u).rho - rho_g));
    }
    v.check(worst <= 1e-3, "3 states at t=20 lambda^2/(sigma^2 gamma_nd): max dist_gibbs " + sci(worst) + " <= 1e-3");

    const double slow = u.resonances().get(0, 2).energy.imag();
    const auto late = trajectory(level(0), p, u, geometric_grid(2.0 / slow, 8.0 / slow, 30), c.setup.threads);
    const double fitted = fit_decay_rate(late, Channel::Gibbs, 0.0, 1e300);
    const double closed = p.sigma * p.sigma * gnd / p.lambda_sq();
    const double e_num = rel(fitted, slow), e_closed = rel(fitted, closed);
    v.check(e_num <= 0.10, "fitted slow rate vs Im eps0^(2) numeric rel " + sci(e_num) + " <= 10%");
    v.check(e_closed <= 0.20, "fitted slow rate vs closed form rel " + sci(e_closed) + " <= 20%");
}

void criterion7(const Context& c, Verdict& v, double& trajectory_seconds) {
    const SystemParams p = c.setup.params;
    const auto u = c.propagator(p.sigma);
    const double t_fast = 20.0 / (p.lambda_sq() * c.rc.delta);
    const double t_plateau = 0.05 * p.lambda_sq() / (p.sigma * p.sigma);

    const auto start = std::chrono::steady_clock::now();
    const auto full = trajectory(level(0), p, u, default_time_grid(p), c.setup.threads);
    trajectory_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto probe = trajectory(level(0), p, u, {t_fast, t_plateau}, 1);

    v.check(probe.dist_qstat[0] <= 1e-3,
            "level1 dist_qstat at t=20/(lambda^2 delta) " + sci(probe.dist_qstat[0]) + " <= 1e-3");
    v.check(probe.dist_gibbs[0] >= 0.05, "dist_gibbs there " + sci(probe.dist_gibbs[0]) + " >= 0.05");
    v.check(probe.dist_gibbs[1] >= 0.01,
            "plateau dist_gibbs at t=0.05 lambda^2/sigma^2 " + sci(probe.dist_gibbs[1]) + " >= 0.01");
    v.check(trajectory_seconds < 60.0, "400-point trajectory " + sci(trajectory_seconds) + " s < 60 s");
    v.check(full.dist_gibbs.back() <= 1e-3, "final dist_gibbs " + sci(full.dist_gibbs.back()) + " <= 1e-3");

    const auto other = [&](const DensityMatrix& r) {
        return trajectory(r, p, u, {t_fast}, 1).dist_qstat[0];
    };
    v.note("offset of order sigma/lambda^2 = " + sci(p.sigma / p.lambda_sq()) + "; dist_qstat for level2 " +
           sci(other(level(1))) + ", mixed " + sci(other(DensityMatrix(DensityMatrix::Identity() / 3.0))));
}

void criterion8(const Context& c, Verdict& v) {
    const SystemParams p0 = c.at_sigma(0.0);
    const auto u0 = c.propagator(0.0);
    const double eb = std::exp(p0.beta * p0.gap());
    const double far = 400.0 / (p0.lambda_sq() * c.rc.delta);
    double worst0 = 0.0;
    for (double pd : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        worst0 = std::max(worst0, std::abs(donor_probability(p0, pd, far, u0) - (1 + pd) / (2 * (1 + eb))));
    }
    v.check(worst0 <= 1e-6, "sigma=0 p_D(inf) vs (1+p_D(0))/(2(1+e^{beta Delta})) " + sci(worst0) + " <= 1e-6");

    const SystemParams p = c.setup.params;
    const auto u = c.propagator(p.sigma);
    const double t_end = 20.0 * p.lambda_sq() / (p.sigma * p.sigma * gamma_nd(c.rc).exact);
    const double e1 = std::abs(donor_probability(p, 1.0, t_end, u) - 1.0 / (1.0 + 2.0 * eb));
    v.check(e1 <= 1e-3, "sigma>0 p_D(inf) vs (1+2e^{beta Delta})^-1 " + sci(e1) + " <= 1e-3");

    const double tol = 2.0 * (p.sigma + p.lambda_sq());
    const double lo = 5.0 / p.lambda_sq(), hi = 0.2 * p.lambda_sq() / (p.sigma * p.sigma);
    double worst = 0.0;
    for (double t : geometric_grid(lo, std::max(hi, 2.0 * lo), 40)) {
        worst = std::max(worst, std::abs(observation_curve(p, c.rc, t).p - donor_probability(p, 1.0, t, u)));
    }
    v.check(worst <= tol, "observation curve vs evolve over window " + sci(worst) + " <= " + sci(tol));
    const double t_plateau = 20.0 / (p.lambda_sq() * c.rc.delta);
    const double plateau = std::abs(observation_curve(p, c.rc, 0.0).p_qstat - donor_probability(p, 1.0, t_plateau, u));
    v.check(plateau <= tol, "plateau p_qstat vs evolve " + sci(plateau) + " <= " + sci(tol));
}

void criterion9(const Context& c, Verdict& v) {
    const SystemParams p0 = c.at_sigma(0.0);
    const auto u0 = c.propagator(0.0);
    std::mt19937 rng(99);
    double trace0 = 0.0, herm = 0.0;
    for (int n = 0; n < 3; ++n) {
        const auto tr = trajectory(random_density(rng), p0, u0, default_time_grid(p0, 100), c.setup.threads);
        trace0 = std::max(trace0, tr.max_trace_deviation());
        herm = std::max(herm, tr.max_hermiticity_deviation());
    }
    v.check(trace0 <= 1e-12, "sigma=0 max trace deviation " + sci(trace0) + " <= 1e-12");

    const SystemParams p = c.setup.params;
    const SystemParams ph = c.at_sigma(0.5 * p.sigma);
    const auto u = c.propagator(p.sigma), uh = c.propagator(ph.sigma);
    double worst_ratio = 0.0;
    const double t_hi = 1.0 / p.lambda_sq();
    for (double t : {0.0, 0.25 * t_hi, t_hi}) {
        const double d = evolve(level(1), p, t, u).trace_deviation;
        const double dh = evolve(level(1), ph, t, uh).trace_deviation;
        worst_ratio = std::max(worst_ratio, std::abs(d / dh - 2.0) / 2.0);
    }
    v.check(worst_ratio <= 0.05, "trace deviation halves with sigma, worst ratio error " + sci(worst_ratio) + " <= 5%");

    for (int n = 0; n < 3; ++n) {
        const auto tr = trajectory(random_density(rng), p, u, default_time_grid(p, 100), c.setup.threads);
        herm = std::max(herm, tr.max_hermiticity_deviation());
    }
    v.check(herm <= 1e-10, "max Hermiticity deviation before Hermitization " + sci(herm) + " <= 1e-10");
}

void criterion10(const Context& c, Verdict& v) {
    FormFactor ff = c.setup.reservoir;
    ff.n = 0;
    ff.cutoff_exponent = 1;
    const double beta = c.setup.params.beta;
    double worst = 0.0;
    for (double kappa : {0.5, 1.0, 2.0}) {
        ff.cutoff = kappa;
        const double pref = 0.5 * ff.angular_weight * ff.amplitude * ff.amplitude / (beta * beta);
        // T1 vanishes at κ0 t = 1, so errors are measured against T1(0).
        const double scale = correlation_closed(ff, beta, 0.0).t1;
        for (double s : {0.0, 0.5, 1.0, 2.0}) {
            const double t = s / kappa;
            const double t1 = correlation(ff, beta, t) / pref - correlation_pieces_quadrature(ff, beta, t).t2;
            worst = std::max(worst, std::abs(t1 - correlation_closed(ff, beta, t).t1) / scale);
        }
    }
    v.check(worst <= 1e-4, "T1 closed form vs reconstructed, max err / T1(0) " + sci(worst) + " <= 1e-4");

    double worst_tau = 0.0;
    for (double kappa : {0.5, 1.0, 2.0}) {
        ff.cutoff = kappa;
        worst_tau = std::max(worst_tau, std::abs(correlation_time(ff, beta) * kappa - 1.0));
    }
    v.check(worst_tau <= 0.15, "tau_c kappa0 - 1 worst " + sci(worst_tau) + " <= 15%");
}

} // namespace

const char* status_name(Status s) {
    switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
    }
    return "?";
}

AcceptanceSetup standard_setup() {
    AcceptanceSetup s;
    s.params.E0 = 1.0;
    s.params.E = 0.0;
    s.params.beta = 1.0;
    s.params.lambda = 0.05;
    s.params.sigma = 1e-5;
    s.reservoir.amplitude = 0.3;
    return s;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceSetup& setup) {
    Context ctx{setup, {}};
    ctx.rc = reservoir_constants(setup.reservoir, setup.params.beta, setup.params.gap());
    const bool regime = setup.params.regime_ok();
    const bool split = setup.params.sigma > 0.0;
    double trajectory_seconds = 0.0;

    struct Entry {
        int id;
        const char* name;
        bool needs_regime;
        bool needs_split;  // σ > 0
        double budget;  // seconds, 0 = none
        std::function<void(Verdict&)> run;
    };
    const std::vector<Entry> entries{
        {1, "quadrature oracle", false, false, 5.0, [&](Verdict& v) { criterion1(ctx, v); }},
        {2, "eigenvalue oracle", true, false, 5.0, [&](Verdict& v) { criterion2(ctx, v); }},
        {3, "propagator algebra", false, false, 5.0, [&](Verdict& v) { criterion3(ctx, v); }},
        {4, "stationarity on the invariant manifold", false, false, 0.0, [&](Verdict& v) { criterion4(ctx, v); }},
        {5, "final state at sigma = 0", true, false, 0.0, [&](Verdict& v) { criterion5(ctx, v); }},
        {6, "unique equilibrium", true, true, 0.0, [&](Verdict& v) { criterion6(ctx, v); }},
        {7, "two-timescale structure", true, true, 0.0,
         [&](Verdict& v) { criterion7(ctx, v, trajectory_seconds); }},
        {8, "donor values", true, true, 0.0, [&](Verdict& v) { criterion8(ctx, v); }},
        {9, "conservation contracts", true, true, 0.0, [&](Verdict& v) { criterion9(ctx, v); }},
        {10, "correlation appendix", false, false, 0.0, [&](Verdict& v) { criterion10(ctx, v); }},
    };

    std::vector<CriterionResult> out;
    for (const auto& e : entries) {
        CriterionResult r;
        r.id = e.id;
        r.name = e.name;
        if ((e.needs_regime && !regime) || (e.needs_split && !split)) {
            r.status = Status::Skip;
            r.detail = !regime ? "regime sigma < lambda^2 < Delta not satisfied" : "needs sigma > 0";
            out.push_back(r);
            continue;
        }
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            e.run(v);
        } catch (const std::exception& ex) {
            v.check(false, std::string("exception: ") + ex.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (e.budget > 0.0) v.check(r.seconds < e.budget, "runtime " + sci(r.seconds) + " s < " + sci(e.budget) + " s");
        r.status = v.ok() ? Status::Pass : Status::Fail;
        r.detail = v.detail();
        out.push_back(r);
    }
    return out;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results) {
        if (r.status == Status::Fail) return false;
    }
    return true;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream s;
    s << status_name(r.status) << ' ' << (r.id < 10 ? " " : "") << r.id << ' ' << r.name << ": " << r.detail;
    if (r.status != Status::Skip) s << " (" << sci(r.seconds) << " s)";
    return s.str();
}

} // namespace lambda_dyn
