// test_resonance.cpp — Level shift operators against the perturbative energies and projections

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "lambda_dyn/quad_precision.hpp"
#include "lambda_dyn/resonance.hpp"

using namespace lambda_dyn;

namespace {

SystemParams params(double sigma, double lambda = 0.05) {
    SystemParams p;
    p.sigma = sigma;
    p.lambda = lambda;
    return p;
}

const ReservoirConstants& constants() {
    static const ReservoirConstants rc = [] {
        FormFactor ff;
        ff.amplitude = 0.3;
        return reservoir_constants(ff, 1.0, 1.0);
    }();
    return rc;
}

// Sector-0 eigenvalue closest to a target, computed in quad precision.
template <class Real>
std::complex<Real> nearest_zero_sector(const SystemParams& p, std::complex<Real> target) {
    const auto m = build_lambda0<Real>(p, constants());
    const auto k = lambda0_kernel<Real>(p.beta, p.gap());
    const auto pairs = eigensolve_small<Real>(m, &k);
    std::complex<Real> best = pairs[1].value;
    for (std::size_t i = 1; i < pairs.size(); ++i) {
        if (abs(pairs[i].value - target) < abs(best - target)) best = pairs[i].value;
    }
    return best;
}

template <class Real>
std::complex<Real> nearest_plus_sector(const SystemParams& p, std::complex<Real> target) {
    const auto [plus, minus] = build_lambda_pm<Real>(p, constants());
    const auto pairs = eigensolve_small<Real>(plus);
    return abs(pairs[0].value - target) < abs(pairs[1].value - target) ? pairs[0].value
                                                                        : pairs[1].value;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    return (std::log(y.back()) - std::log(y.front())) / (std::log(x.back()) - std::log(x.front()));
}

} // namespace

TEST_CASE("Λ0 structure") {
    const auto& rc = constants();
    const Eigen::MatrixXcd b = build_lambda0<double>(params(1e-3, 0.0), rc);
    const double s = 1e-3 / std::sqrt(2.0);
    CHECK(b(1, 3) == cd(s));
    CHECK(b(2, 3) == cd(-s));
    CHECK(b(3, 1) == cd(s));
    CHECK(b(3, 2) == cd(-s));
    CHECK(b.cwiseAbs().sum() == doctest::Approx(4 * s));

    const Eigen::MatrixXcd a = build_lambda0<double>(params(0.0), rc);
    CHECK((a.col(1).head(2) + a.col(0).head(2)).norm() == 0.0);
    CHECK(a.row(2).norm() == 0.0);
    CHECK(a.col(2).norm() == 0.0);
    const double l2 = 0.0025, e = std::exp(1.0);
    CHECK(std::abs(a(0, 0) - cd(0, 2 * e * rc.delta * l2)) < 1e-14 * std::abs(a(0, 0)));
    CHECK(std::abs(a(1, 0) - cd(0, -2 * rc.delta * l2)) < 1e-18);
    CHECK(std::abs(a(3, 4) - 2 * l2 * rc.vartheta) < 1e-18);
    CHECK(a(3, 4) == a(4, 3));
    CHECK(a(3, 3) == a(4, 4));
    // B + A decomposition.
    const Eigen::MatrixXcd full = build_lambda0<double>(params(1e-3), rc);
    CHECK((full - a - b).norm() < 1e-18);
}

TEST_CASE("Λ0 kernel is exact on a grid") {
    const auto k = lambda0_kernel<double>(1.0, 1.0);
    for (double s : {0.0, 1e-7, 1e-5, 1e-3, 0.1}) {
        for (double l : {0.0, 0.01, 0.05, 0.3}) {
            const Eigen::MatrixXcd m = build_lambda0<double>(params(s, l), constants());
            CHECK((m * k.right).norm() < 1e-14);
            CHECK((m.adjoint() * k.left).norm() < 1e-14);
        }
    }
}

TEST_CASE("Λ±Δ structure") {
    const auto& rc = constants();
    const auto [p0, m0] = build_lambda_pm<double>(params(0.0, 0.0), rc);
    CHECK((p0 - Eigen::MatrixXcd::Identity(2, 2)).norm() == 0.0);
    const auto [plus, minus] = build_lambda_pm<double>(params(0.0), rc);
    CHECK((minus + plus.conjugate()).norm() == 0.0);
    const auto pairs = eigensolve_small<double>(plus);
    const double l2 = 0.0025;
    std::vector<cd> expect{1.0 - 2 * l2 * rc.eta, cd(1.0, -4 * l2 * rc.eta.imag())};
    for (const auto& e : expect) {
        const double d = std::min(std::abs(pairs[0].value - e), std::abs(pairs[1].value - e));
        CHECK(d < 1e-14);
    }
    const auto [ps, ms] = build_lambda_pm<double>(params(1e-3), rc);
    const auto sp = eigensolve_small<double>(ps), sm = eigensolve_small<double>(ms);
    for (const auto& a : sp) {
        double d = 1.0;
        for (const auto& b : sm) d = std::min(d, std::abs(b.value + std::conj(a.value)));
        CHECK(d < 1e-12);
    }
}

TEST_CASE("σ = 0 sector-0 spectrum matches the proposition") {
    const auto& rc = constants();
    const double l2 = 0.0025, e = std::exp(1.0);
    const auto set = resonance_set(params(0.0), rc);
    std::vector<cd> expect{0.0, 0.0, cd(0, 2 * rc.delta * l2 * (1 + e)),
                           cd(2 * l2 * rc.vartheta, rc.delta * l2), cd(-2 * l2 * rc.vartheta, rc.delta * l2)};
    CHECK(set.get(0, 1).energy == cd(0.0));
    CHECK(set.get(0, 2).energy == cd(0.0));
    for (int s = 3; s <= 5; ++s) {
        CHECK(std::abs(set.get(0, s).energy - expect[s - 1]) <= 1e-10 * std::abs(expect[s - 1]));
    }
    const auto pert = perturbative_energies<double>(params(0.0), rc);
    for (int s = 0; s < 5; ++s) CHECK(std::abs(pert.zero[s] - expect[s]) <= 1e-15);
}

TEST_CASE("perturbative energies") {
    const auto& rc = constants();
    const auto p = params(1e-5);
    const auto e = perturbative_energies<double>(p, rc);
    CHECK(e.zero[0] == cd(0.0));
    const double q = std::exp(-1.0);
    const double g = rc.delta * (2 + q) / (2 * (1 + q) * (4 * rc.vartheta * rc.vartheta + rc.delta * rc.delta));
    CHECK(e.zero[1].imag() * p.lambda_sq() / (p.sigma * p.sigma) == doctest::Approx(g).epsilon(1e-14));
    CHECK(e.zero[1].real() == 0.0);
    CHECK(e.zero[1].imag() == doctest::Approx(6.88399e-9).epsilon(1e-5));
    CHECK(e.plus[1].imag() == doctest::Approx(4 * p.lambda_sq() * rc.j_tilde0).epsilon(1e-14));
    for (int s = 0; s < 2; ++s) CHECK(e.minus[s] == -std::conj(e.plus[s]));
    CHECK(gamma_nd(rc).exact == doctest::Approx(g).epsilon(1e-14));
}

TEST_CASE("ε0^(2) converges with slope 2 in σ (quad precision oracle)") {
    const auto& rc = constants();
    std::vector<double> sig{1e-5, 1e-6, 1e-7}, err;
    for (double s : sig) {
        const auto p = params(s);
        const auto pert = perturbative_energies<quad_real>(p, rc).zero[1];
        const auto num = nearest_zero_sector<quad_real>(p, pert);
        err.push_back(static_cast<double>(abs(num - pert) / abs(pert)));
    }
    MESSAGE("relative errors ", err[0], " ", err[1], " ", err[2]);
    CHECK(std::abs(slope(sig, err) - 2.0) < 0.3);
    CHECK(err[1] < 0.01);
}

TEST_CASE("fast resonances converge as σ²/λ²") {
    const auto& rc = constants();
    std::vector<double> sig{1e-5, 1e-6, 1e-7};
    for (int s : {2, 3, 4}) {
        std::vector<double> err;
        for (double x : sig) {
            const auto p = params(x);
            const auto pert = perturbative_energies<quad_real>(p, rc).zero[s];
            err.push_back(static_cast<double>(abs(nearest_zero_sector<quad_real>(p, pert) - pert)));
        }
        CHECK(std::abs(slope(sig, err) - 2.0) < 0.3);
        CHECK(err[0] < 10 * sig[0] * sig[0] / 0.0025);
    }
    for (int s : {0, 1}) {
        std::vector<double> err;
        for (double x : sig) {
            const auto p = params(x);
            const auto pert = perturbative_energies<quad_real>(p, rc).plus[s];
            err.push_back(static_cast<double>(abs(nearest_plus_sector<quad_real>(p, pert) - pert)));
        }
        CHECK(std::abs(slope(sig, err) - 2.0) < 0.3);
        CHECK(err[0] < 10 * sig[0] * sig[0] / 0.0025);
    }
}

TEST_CASE("closed-form projections") {
    const auto cf = closed_form_projections(1.0, 1.0);
    auto check_idempotent = [](const Eigen::MatrixXcd& p) { CHECK((p * p - p).norm() < 1e-14); };
    for (const auto& p : cf.zero) check_idempotent(p);
    for (const auto& p : cf.plus) check_idempotent(p);
    for (const auto& p : cf.minus) check_idempotent(p);
    Eigen::VectorXcd ref(5);
    ref << 1, 1, 1, 0, 0;
    ref /= std::sqrt(3.0);
    CHECK((cf.zero[0] * ref - ref).norm() < 1e-14);
    Eigen::MatrixXcd p11(2, 2);
    p11 << 0.5, -0.5, -0.5, 0.5;
    CHECK((cf.plus[0] - p11).norm() < 1e-15);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(5, 5);
    for (const auto& p : cf.zero) sum += p;
    CHECK((sum - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-14);

    const auto set = resonance_set(params(0.0), constants());
    for (int s = 1; s <= 5; ++s) {
        CHECK((set.get(0, s).projection() - cf.zero[s - 1]).cwiseAbs().maxCoeff() < 1e-8);
    }
    for (int s = 1; s <= 2; ++s) {
        CHECK((set.get(1, s).projection() - cf.plus[s - 1]).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((set.get(-1, s).projection() - cf.minus[s - 1]).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("resonance set invariants") {
    for (double s : {0.0, 1e-7, 1e-5, 1e-3}) {
        const auto p = params(s);
        const auto set = resonance_set(p, constants());
        REQUIRE(set.data.size() == 9);
        CHECK(set.labels_matched);
        CHECK(set.pairing_deviation < 1e-12);
        int zeros = 0;
        for (const auto& d : set.data) {
            CHECK(d.energy.imag() >= -1e-12);
            if (d.energy == cd(0.0)) ++zeros;
            const Eigen::MatrixXcd pr = d.projection();
            CHECK((pr * pr - pr).norm() < 1e-10);
        }
        CHECK(zeros == (s == 0.0 ? 2 : 1));
        CHECK(set.get(0, 1).energy == cd(0.0));

        const auto ops = level_shift_operators<double>(p, constants());
        for (int sector : {-1, 0, 1}) {
            const Eigen::MatrixXcd& m = sector == 0 ? ops.lambda0 : (sector == 1 ? ops.lambda_plus : ops.lambda_minus);
            const int n = sector_size(sector);
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
            for (const auto& d : set.data) {
                if (d.sector != sector) continue;
                sum += d.projection();
                CHECK((m * d.right - d.energy * d.right).norm() <= 1e-10 * m.norm());
                CHECK((m.adjoint() * d.left - std::conj(d.energy) * d.left).norm() <= 1e-10 * m.norm() * d.left.norm());
                for (const auto& e : set.data) {
                    if (e.sector != sector) continue;
                    const cd ip = d.left.dot(e.right);
                    CHECK(std::abs(ip - (d.index == e.index ? 1.0 : 0.0)) < 1e-10);
                }
            }
            CHECK((sum - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);
        }
        for (int k = 1; k <= 2; ++k) {
            CHECK(set.get(-1, k).energy == -std::conj(set.get(1, k).energy));
        }
        // Embedded vectors keep the pairing.
        const auto& d = set.get(0, 3);
        CHECK(std::abs(d.left_full().dot(d.right_full()) - 1.0) < 1e-12);
    }
}

TEST_CASE("labels follow the perturbative formulas at the standard point") {
    const auto p = params(1e-5);
    const auto set = resonance_set(p, constants());
    const auto pert = perturbative_energies<double>(p, constants());
    for (int s = 2; s <= 5; ++s) {
        CHECK(std::abs(set.get(0, s).energy - pert.zero[s - 1]) < 1e-3 * std::abs(pert.zero[s - 1]) + 1e-12);
    }
    CHECK(std::abs(set.get(1, 1).energy - pert.plus[0]) < 1e-8);
    CHECK(std::abs(set.get(1, 2).energy - pert.plus[1]) < 1e-8);
    CHECK(set.get(0, 2).energy.imag() == doctest::Approx(6.88397e-9).epsilon(1e-4));
}

TEST_CASE("γ_deg variants") {
    const auto& rc = constants();
    const auto set = resonance_set(params(0.0), rc);
    const auto g = gamma_deg(rc);
    CHECK(gamma_deg_exact(set, 0.05) == doctest::Approx(g.proposition).epsilon(1e-10));
    CHECK(g.proposition == doctest::Approx(std::min(rc.delta, 2 * rc.j_tilde0)).epsilon(1e-15));
    CHECK(g.discussion == doctest::Approx(0.5 * g.proposition).epsilon(1e-14));

    FormFactor ff;
    ff.amplitude = 0.3;
    const auto cold = reservoir_constants(ff, 12.0, 1.0);
    const auto gc = gamma_deg(cold);
    CHECK(gc.low_temperature == doctest::Approx(gc.proposition).epsilon(1e-4));
    const auto hot = reservoir_constants(ff, 0.01, 1.0);
    const auto gh = gamma_deg(hot);
    CHECK(gh.high_temperature == doctest::Approx(gh.proposition).epsilon(0.01));
}

TEST_CASE("γ_nd variants") {
    FormFactor ff;
    ff.amplitude = 0.3;
    const auto cold = reservoir_constants(ff, 6.0, 1.0);
    const auto g = gamma_nd(cold);
    CHECK(g.exact / g.low_temperature < 2.0);
    CHECK(g.exact / g.low_temperature > 0.5);
    const auto hot = reservoir_constants(ff, 0.005, 1.0);
    const auto gh = gamma_nd(hot);
    CHECK(gh.high_temperature == doctest::Approx(gh.exact).epsilon(0.02));

    const auto p = params(1e-6);
    const auto set = resonance_set(p, constants());
    CHECK(gamma_nd_numeric(set, p) == doctest::Approx(gamma_nd(constants()).exact).epsilon(1e-2));
    CHECK_THROWS_AS(gamma_nd_numeric(set, params(0.0)), DomainError);
}
