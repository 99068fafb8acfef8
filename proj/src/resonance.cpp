// resonance.cpp — Numeric diagonalisation, labelling and rate summaries

#include "lambda_dyn/resonance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include "lambda_dyn/errors.hpp"

namespace lambda_dyn {

namespace {

Eigen::MatrixXcd outer(const Eigen::VectorXcd& r, const Eigen::VectorXcd& l) {
    return r * l.adjoint() / l.dot(r);
}

Eigen::VectorXcd vec5(double a, double b, double c, double d, double e) {
    Eigen::VectorXcd v(5);
    v << a, b, c, d, e;
    return v;
}

Eigen::VectorXcd vec2(double a, double b) {
    Eigen::VectorXcd v(2);
    v << a, b;
    return v;
}

// Permutation of `numeric` indices minimising Σ|numeric - target|.
std::vector<int> best_assignment(const std::vector<cd>& numeric, const std::vector<cd>& target) {
    std::vector<int> perm(numeric.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) cost += std::abs(numeric[perm[k]] - target[k]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

bool all_finite(const std::vector<cd>& v) {
    return std::all_of(v.begin(), v.end(),
                       [](cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

std::vector<int> ascending_imag(const std::vector<cd>& numeric) {
    std::vector<int> order(numeric.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (numeric[a].imag() != numeric[b].imag()) return numeric[a].imag() < numeric[b].imag();
        return numeric[a].real() < numeric[b].real();
    });
    return order;
}

ResonanceDatum make_datum(int sector, int index, const EigenPair<double>& e) {
    ResonanceDatum d;
    d.sector = sector;
    d.index = index;
    d.energy = e.value;
    d.right = e.right;
    d.left = e.left;
    return d;
}

} // namespace

ClosedFormProjections closed_form_projections(double beta, double gap) {
    const double q = std::exp(-beta * gap);
    ClosedFormProjections p;
    p.zero[0] = outer(vec5(1, 1, 1, 0, 0), vec5(q, 1, 1, 0, 0));
    p.zero[1] = outer(vec5(1, 1, -1 - q, 0, 0), vec5(q, 1, -1 - q, 0, 0));
    p.zero[2] = outer(vec5(1, -q, 0, 0, 0), vec5(1, -1, 0, 0, 0));
    p.zero[3] = outer(vec5(0, 0, 0, 1, 1), vec5(0, 0, 0, 1, 1));
    p.zero[4] = outer(vec5(0, 0, 0, 1, -1), vec5(0, 0, 0, 1, -1));
    p.plus[0] = outer(vec2(1, -1), vec2(1, -1));
    p.plus[1] = outer(vec2(1, 1), vec2(1, 1));
    p.minus = p.plus;  // real projections: the conjugate map leaves them unchanged
    return p;
}

int sector_size(int sector) {
    if (sector == 0) return 5;
    if (sector == 1 || sector == -1) return 2;
    throw DomainError("sector must be -1, 0 or +1");
}

Eigen::Matrix<cd, 9, Eigen::Dynamic> sector_basis(int sector) {
    if (sector == 0) return psi_basis();
    if (sector == 1) return sector_plus_basis();
    if (sector == -1) return sector_minus_basis();
    throw DomainError("sector must be -1, 0 or +1");
}

Vector9cd ResonanceDatum::right_full() const { return sector_basis(sector) * right; }
Vector9cd ResonanceDatum::left_full() const { return sector_basis(sector) * left; }

const ResonanceDatum& ResonanceSet::get(int sector, int index) const {
    for (const auto& d : data) {
        if (d.sector == sector && d.index == index) return d;
    }
    throw DomainError("no resonance (" + std::to_string(sector) + ", " + std::to_string(index) + ")");
}

ResonanceSet resonance_set(const SystemParams& p, const ReservoirConstants& rc) {
    p.validate();
    const auto ops = level_shift_operators<double>(p, rc);
    const auto pert = perturbative_energies<double>(p, rc);
    ResonanceSet set;

    // Sector 0: split off the exact kernel, then label the remaining four.
    const auto kernel = lambda0_kernel<double>(p.beta, p.gap());
    auto zero = eigensolve_small<double>(ops.lambda0, &kernel);
    const double roundoff = 1e-14 * ops.lambda0.norm();
    for (auto& e : zero) {
        if (std::abs(e.value) <= roundoff) e.value = 0.0;
    }
    std::vector<cd> numeric, target(pert.zero.begin() + 1, pert.zero.end());
    for (std::size_t k = 1; k < zero.size(); ++k) numeric.push_back(zero[k].value);
    std::vector<int> order;
    if (all_finite(target)) {
        order = best_assignment(numeric, target);
    } else {
        order = ascending_imag(numeric);
        set.labels_matched = false;
    }
    set.data.push_back(make_datum(0, 1, zero[0]));
    for (int s = 0; s < 4; ++s) set.data.push_back(make_datum(0, s + 2, zero[order[s] + 1]));

    // Sector +1 labelled against ε1^(1), ε1^(2); sector -1 is its conjugate image.
    auto plus = eigensolve_small<double>(ops.lambda_plus);
    std::vector<cd> pv{plus[0].value, plus[1].value};
    const auto pord = best_assignment(pv, {pert.plus[0], pert.plus[1]});
    auto minus = eigensolve_small<double>(ops.lambda_minus);

    double dev = std::numeric_limits<double>::infinity();
    for (int swap = 0; swap < 2; ++swap) {
        double worst = 0.0;
        for (int k = 0; k < 2; ++k) {
            worst = std::max(worst, std::abs(minus[(k + swap) % 2].value + std::conj(plus[k].value)));
        }
        dev = std::min(dev, worst);
    }
    set.pairing_deviation = dev;
    if (dev > 1e-10 * std::max(1.0, ops.lambda_plus.norm())) {
        std::ostringstream msg;
        msg << "sector -1 spectrum deviates from -conj(sector +1) by " << dev;
        throw ConsistencyError(msg.str());
    }
    for (int s = 0; s < 2; ++s) set.data.push_back(make_datum(1, s + 1, plus[pord[s]]));
    for (int s = 0; s < 2; ++s) {
        const auto& src = plus[pord[s]];
        EigenPair<double> m{-std::conj(src.value), src.right.conjugate(), src.left.conjugate()};
        set.data.push_back(make_datum(-1, s + 1, m));
    }

    for (const auto& d : set.data) {
        if (d.energy.imag() < -1e-12) {
            std::ostringstream msg;
            msg << "resonance (" << d.sector << ", " << d.index << ") has Im ε = " << d.energy.imag();
            throw ConsistencyError(msg.str());
        }
    }
    return set;
}

double gamma_deg_exact(const ResonanceSet& set, double lambda) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : set.data) {
        if (d.sector == 0 && d.index <= 2) continue;
        best = std::min(best, d.energy.imag());
    }
    return best / (lambda * lambda);
}

GammaDeg gamma_deg(const ReservoirConstants& rc) {
    const double T = 1.0 / rc.beta;
    GammaDeg g;
    g.proposition = std::min(rc.delta, 2.0 * rc.j_tilde0 * T);
    g.discussion = std::min(rc.j_gap / std::expm1(rc.beta * rc.gap), rc.j_tilde0 * T);
    g.low_temperature = 2.0 * std::min(rc.j_gap * std::exp(-rc.gap / T), T * rc.j_tilde0);
    g.high_temperature = 2.0 * T * std::min(rc.j_gap / rc.gap, rc.j_tilde0);
    return g;
}

GammaNd gamma_nd(const ReservoirConstants& rc) {
    const double q = std::exp(-rc.beta * rc.gap);
    const double T = 1.0 / rc.beta;
    const double J = rc.j_gap, th = rc.vartheta, d = rc.delta;
    GammaNd g;
    g.exact = d * (2.0 + q) / (2.0 * (1.0 + q) * (4.0 * th * th + d * d));
    g.low_temperature = 0.5 * J / (th * th * std::exp(rc.gap / T) + J * J * std::exp(-rc.gap / T));
    const double x = rc.gap / T;
    g.high_temperature = 0.375 * x * J / (th * th * x * x + J * J);
    return g;
}

double gamma_nd_numeric(const ResonanceSet& set, const SystemParams& p) {
    if (!(p.sigma > 0.0)) throw DomainError("gamma_nd needs sigma > 0");
    return set.get(0, 2).energy.imag() * p.lambda_sq() / (p.sigma * p.sigma);
}

} // namespace lambda_dyn
