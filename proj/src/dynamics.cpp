// dynamics.cpp — Evaluation of T_t through the resonance expansion

#include "lambda_dyn/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn {

namespace {

cd phase(cd energy, double t) { return std::exp(cd(0.0, 1.0) * energy * t); }

Matrix9cd embed(const ResonanceDatum& d) {
    const auto basis = sector_basis(d.sector);
    return basis * d.projection() * basis.adjoint();
}

} // namespace

Propagator::Propagator(ResonanceSet set) : set_(std::move(set)) {
    projections_.reserve(set_.data.size());
    for (const auto& d : set_.data) projections_.push_back(embed(d));
}

Matrix9cd Propagator::matrix(double t) const {
    Matrix9cd u = Matrix9cd::Zero();
    for (std::size_t k = 0; k < projections_.size(); ++k) {
        u += phase(set_.data[k].energy, t) * projections_[k];
    }
    return u;
}

Matrix9cd Propagator::term(int sector, int index, double t) const {
    for (std::size_t k = 0; k < projections_.size(); ++k) {
        const auto& d = set_.data[k];
        if (d.sector == sector && d.index == index) return phase(d.energy, t) * projections_[k];
    }
    throw DomainError("no resonance (" + std::to_string(sector) + ", " + std::to_string(index) + ")");
}

Matrix9cd Propagator::limit() const {
    Matrix9cd u = Matrix9cd::Zero();
    for (std::size_t k = 0; k < projections_.size(); ++k) {
        if (set_.data[k].energy == cd(0.0, 0.0)) u += projections_[k];
    }
    return u;
}

Matrix3cd contract(const DensityMatrix& rho0, const Eigen::Matrix3d& x, const Matrix9cd& v) {
    const Matrix9cd big_b = right_factor(b_operator(rho0));
    const Vector9cd psi_s = big_b * reference_vector();
    // w_m = ⟨ψ_S, (1⊗b) V e_m⟩; the input vector for (k,l) is x_k x_l e_{3l+k} / √3.
    const Eigen::Matrix<cd, 1, 9> w = psi_s.adjoint() * big_b * v;
    const double r3 = 1.0 / std::sqrt(3.0);
    Matrix3cd out;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) out(k, l) = x(k, k) * x(l, l) * r3 * w(3 * l + k);
    return out;
}

Evolved evolve(const DensityMatrix& rho0, const SystemParams& p, double t, const Propagator& u) {
    if (!(t >= 0.0)) throw DomainError("evolve needs t >= 0");
    const Matrix3cd raw = contract(rho0, x_sigma(p), u.matrix(t));
    Evolved e;
    e.hermiticity_deviation = hermiticity_deviation(raw);
    if (e.hermiticity_deviation > kHermiticityLimit) {
        std::ostringstream msg;
        msg << "evolved state at t=" << t << " deviates from Hermiticity by "
            << e.hermiticity_deviation;
        throw ConsistencyError(msg.str());
    }
    e.rho = hermitize(raw);
    e.trace_deviation = std::abs(raw.trace() - 1.0);
    e.min_eigenvalue = min_eigenvalue(e.rho);
    return e;
}

Matrix3cd heisenberg(const Matrix3cd& a, double t, const Propagator& u) {
    return unvec(u.matrix(t) * vec(a));
}

Matrix3cd evolve_term(const DensityMatrix& rho0, const SystemParams& p, double t,
                      const Propagator& u, int sector, int index) {
    if (!(t >= 0.0)) throw DomainError("evolve needs t >= 0");
    return contract(rho0, x_sigma(p), u.term(sector, index, t));
}

DensityMatrix final_state_limit(const DensityMatrix& rho0, const SystemParams& p,
                                const Propagator& u) {
    return hermitize(contract(rho0, x_sigma(p), u.limit()));
}

std::vector<double> geometric_grid(double t_lo, double t_hi, int points) {
    if (!(t_lo > 0.0) || !(t_hi > t_lo) || points < 2) {
        throw DomainError("geometric grid needs 0 < t_lo < t_hi and at least 2 points");
    }
    std::vector<double> g(points);
    const double r = std::log(t_hi / t_lo);
    for (int i = 0; i < points; ++i) g[i] = t_lo * std::exp(r * i / (points - 1));
    g.back() = t_hi;
    return g;
}

std::vector<double> default_time_grid(const SystemParams& p, int points) {
    if (!(p.lambda != 0.0)) throw DomainError("default time grid needs lambda != 0");
    const double t1 = 1.0 / p.lambda_sq();
    const double hi = p.sigma > 0.0 ? 50.0 * p.lambda_sq() / (p.sigma * p.sigma) : 1e4 * t1;
    return geometric_grid(1e-2 * t1, std::max(hi, 10.0 * t1), points);
}

void validate_time_grid(const std::vector<double>& times) {
    if (times.empty()) throw DomainError("time grid is empty");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) {
            throw DomainError("time grid entries must be finite and non-negative");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw DomainError("time grid must be strictly increasing");
        }
    }
}

double Trajectory::max_hermiticity_deviation() const {
    return hermiticity_deviation.empty() ? 0.0
                                         : *std::max_element(hermiticity_deviation.begin(),
                                                             hermiticity_deviation.end());
}

double Trajectory::max_trace_deviation() const {
    return trace_deviation.empty()
               ? 0.0
               : *std::max_element(trace_deviation.begin(), trace_deviation.end());
}

double Trajectory::lowest_eigenvalue() const {
    return min_eig.empty() ? 0.0 : *std::min_element(min_eig.begin(), min_eig.end());
}

Trajectory trajectory(const DensityMatrix& rho0, const SystemParams& p, const Propagator& u,
                      const std::vector<double>& times, unsigned threads) {
    validate_time_grid(times);
    const std::size_t n = times.size();
    Trajectory tr;
    tr.times = times;
    tr.states.resize(n);
    tr.dist_gibbs.resize(n);
    tr.dist_qstat.resize(n);
    tr.dist_final.resize(n);
    tr.p_donor.resize(n);
    tr.min_eig.resize(n);
    tr.hermiticity_deviation.resize(n);
    tr.trace_deviation.resize(n);

    const DensityMatrix g = gibbs(p);
    const DensityMatrix q = quasi_stationary(rho0, p.beta, p.gap());
    const DensityMatrix f = final_state_limit(rho0, p, u);

    auto work = [&](std::size_t i) {
        const Evolved e = evolve(rho0, p, times[i], u);
        tr.states[i] = e.rho;
        tr.dist_gibbs[i] = trace_norm(e.rho - g);
        tr.dist_qstat[i] = trace_norm(e.rho - q);
        tr.dist_final[i] = trace_norm(e.rho - f);
        tr.p_donor[i] = e.rho(0, 0).real();
        tr.min_eig[i] = e.min_eigenvalue;
        tr.hermiticity_deviation[i] = e.hermiticity_deviation;
        tr.trace_deviation[i] = e.trace_deviation;
    };

    unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return tr;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    work(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    // Report the earliest failing time, independent of scheduling.
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return tr;
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& values,
                      double t_lo, double t_hi) {
    if (times.size() != values.size()) throw DomainError("fit_decay_rate: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_lo || times[i] > t_hi) continue;
        if (!(values[i] > 0.0)) {
            std::ostringstream msg;
            msg << "fit_decay_rate: non-positive value " << values[i] << " at t=" << times[i];
            throw NumericError(msg.str());
        }
        const double y = std::log(values[i]);
        sx += times[i];
        sy += y;
        sxx += times[i] * times[i];
        sxy += times[i] * y;
        ++count;
    }
    if (count < 4) throw NumericError("fit_decay_rate: fewer than 4 points in the window");
    const double den = count * sxx - sx * sx;
    if (!(den > 0.0)) throw NumericError("fit_decay_rate: degenerate time window");
    return -(count * sxy - sx * sy) / den;
}

double fit_decay_rate(const Trajectory& traj, Channel channel, double t_lo, double t_hi) {
    switch (channel) {
    case Channel::Gibbs: return fit_decay_rate(traj.times, traj.dist_gibbs, t_lo, t_hi);
    case Channel::QuasiStationary: return fit_decay_rate(traj.times, traj.dist_qstat, t_lo, t_hi);
    case Channel::Final: return fit_decay_rate(traj.times, traj.dist_final, t_lo, t_hi);
    case Channel::Donor: return fit_decay_rate(traj.times, traj.p_donor, t_lo, t_hi);
    }
    throw DomainError("unknown channel");
}

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::Gibbs: return "gibbs";
    case Channel::QuasiStationary: return "qstat";
    case Channel::Final: return "final";
    case Channel::Donor: return "donor";
    }
    return "?";
}

DensityMatrix donor_state(double p_d0, std::optional<double> p2, std::optional<double> p3) {
    if (!(p_d0 >= 0.0 && p_d0 <= 1.0)) throw DomainError("donor population must lie in [0, 1]");
    const double rest = 1.0 - p_d0;
    const double a = p2.value_or(p3 ? rest - *p3 : 0.5 * rest);
    const double b = p3.value_or(rest - a);
    if (a < 0.0 || b < 0.0 || std::abs(p_d0 + a + b - 1.0) > 1e-12) {
        throw DomainError("acceptor populations must be non-negative and sum to 1 - p_D0");
    }
    return Eigen::Vector3d(p_d0, a, b).cast<cd>().asDiagonal();
}

double donor_probability(const SystemParams& p, double p_d0, double t, const Propagator& u,
                         std::optional<double> p2, std::optional<double> p3) {
    return evolve(donor_state(p_d0, p2, p3), p, t, u).rho(0, 0).real();
}

Observation observation_curve(const SystemParams& p, const ReservoirConstants& rc, double t) {
    const double eb = std::exp(p.beta * p.gap());
    Observation o;
    o.gamma = gamma_nd(rc).exact;
    o.p_final = 1.0 / (1.0 + 2.0 * eb);
    const double weight = 1.0 / (2.0 * eb + 3.0 + 1.0 / eb);
    o.p_qstat = o.p_final + weight;
    const double rate = p.sigma == 0.0 ? 0.0 : o.gamma * p.sigma * p.sigma / p.lambda_sq();
    o.p = o.p_final + std::exp(-rate * t) * weight;
    o.in_window = t * p.lambda_sq() >= 5.0;
    return o;
}

TimescaleReport timescale_report(const SystemParams& p, const ReservoirConstants& rc) {
    TimescaleReport r;
    const double l2 = p.lambda_sq();
    r.t1 = 1.0 / l2;
    r.fast_rate = l2 * gamma_deg(rc).proposition;
    if (p.sigma > 0.0) {
        r.t2 = l2 / (p.sigma * p.sigma);
        r.ratio = r.t2 / r.t1;
        r.slow_rate = p.sigma * p.sigma / l2 * gamma_nd(rc).exact;
    }
    r.regime_ok = p.regime_ok();
    return r;
}

} // namespace lambda_dyn
