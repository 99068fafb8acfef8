// test_system.cpp — Λ-system algebra, b-operator and the invariant manifold

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lambda_dyn/errors.hpp"
#include "lambda_dyn/system.hpp"

using namespace lambda_dyn;

namespace {

DensityMatrix random_density(std::mt19937& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix3cd g;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = cd(n(rng), n(rng));
    Matrix3cd r = g * g.adjoint();
    return r / r.trace();
}

Matrix3cd unit(int j, int k) {
    Matrix3cd e = Matrix3cd::Zero();
    e(j, k) = 1.0;
    return e;
}

SystemParams standard(double sigma = 1e-5) {
    SystemParams p;
    p.sigma = sigma;
    p.lambda = 0.05;
    return p;
}

} // namespace

TEST_CASE("hamiltonian") {
    SystemParams p;
    p.E0 = 1.0;
    p.E = 0.0;
    p.sigma = 0.01;
    const auto h = hamiltonian(p);
    CHECK(h(0, 0) == 1.0);
    CHECK(h(1, 1) == 0.005);
    CHECK(h(2, 2) == -0.005);
    CHECK(h(0, 0) - 0.5 * (h(1, 1) + h(2, 2)) == doctest::Approx(p.gap()));
    p.sigma = 0.0;
    CHECK(hamiltonian(p)(1, 1) == hamiltonian(p)(2, 2));
}

TEST_CASE("parameter validation and regime flag") {
    SystemParams p = standard();
    CHECK_NOTHROW(p.validate());
    CHECK(p.regime_ok());
    p.sigma = 0.01;
    CHECK_FALSE(p.regime_ok());
    p.sigma = -1.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = standard();
    p.E = 2.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
    p = standard();
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), DomainError);
}

TEST_CASE("coupling and dark states") {
    const Matrix3cd g = coupling_matrix();
    CHECK(g(0, 1) == cd(1.0));
    CHECK(g(0, 2) == cd(1.0));
    CHECK(g.block<2, 2>(1, 1).norm() == 0.0);
    const SystemParams p0 = standard(0.0);
    for (cd gamma : {cd(1.0), cd(2.0), cd(0.0, 1.0), cd(1.0, 1.0), cd(-0.3, 2.5)}) {
        const Matrix3cd gg = coupling_matrix(gamma);
        CHECK(hermiticity_deviation(gg) == 0.0);
        const Vector3cd t = dark_state(gamma);
        CHECK(std::abs(t.norm() - 1.0) < 1e-15);
        CHECK((gg * t).norm() < 1e-14);
        CHECK(((hamiltonian(p0).cast<cd>() - p0.E * Matrix3cd::Identity()) * t).norm() < 1e-14);
        CHECK(t[0] == cd(0.0));
    }
    const Vector3cd t1 = dark_state();
    CHECK(std::abs(t1[1] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(t1[2] + 1.0 / std::sqrt(2.0)) < 1e-15);
    // γ = i: G_γ annihilates (iφ2 - φ3)/√2.
    const Vector3cd v(0.0, cd(0.0, 1.0) / std::sqrt(2.0), -1.0 / std::sqrt(2.0));
    CHECK((coupling_matrix(cd(0.0, 1.0)) * v).norm() < 1e-15);
}

TEST_CASE("Gibbs state") {
    const double b = 1.3, gap = 0.8;
    CHECK(gibbs(b, gap, 0.0)(0, 0).real() == doctest::Approx(1.0 / (1.0 + 2.0 * std::exp(b * gap))).epsilon(1e-15));
    const double s = 0.2;
    CHECK(gibbs(b, gap, s)(0, 0).real() ==
          doctest::Approx(1.0 / (1.0 + std::exp(b * (gap + s / 2)) + std::exp(b * (gap - s / 2)))).epsilon(1e-14));
    const DensityMatrix hot = gibbs(1e-14, gap, s);
    CHECK((hot - Matrix3cd::Identity() / 3.0).norm() < 1e-13);
    CHECK_NOTHROW(validate_density(gibbs(50.0, 30.0, 1.0)));
}

TEST_CASE("diagonal operators commute exactly") {
    const SystemParams p = standard(1e-3);
    const Matrix3cd h = hamiltonian(p).cast<cd>(), g = gibbs(p), x = x_sigma(p).cast<cd>();
    CHECK((h * g - g * h).norm() == 0.0);
    CHECK((h * x - x * h).norm() == 0.0);
    CHECK((g * x - x * g).norm() == 0.0);
}

TEST_CASE("vectorisation conventions") {
    std::mt19937 rng(3);
    const Matrix3cd a = random_density(rng), b = random_density(rng), x = random_density(rng);
    CHECK((unvec(vec(a)) - a).norm() == 0.0);
    CHECK(vec(unit(1, 2))[5] == cd(1.0));
    // (A ⊗ 1) vec(X) = vec(A X), (1 ⊗ B) vec(X) = vec(X Bᵀ)
    CHECK((left_multiplication(a) * vec(x) - vec(a * x)).norm() < 1e-14);
    CHECK((right_factor(b) * vec(x) - vec(x * b.transpose())).norm() < 1e-14);
}

TEST_CASE("reference vector") {
    const Vector9cd r = reference_vector();
    CHECK(std::abs(r.norm() - 1.0) < 1e-15);
    const Matrix3cd a = Eigen::Vector3d(1, 2, 3).cast<cd>().asDiagonal();
    CHECK(std::abs(r.dot(left_multiplication(a) * r) - 2.0) < 1e-15);
    const auto psi = psi_basis();
    const Vector9cd sum = (psi.col(0) + psi.col(1) + psi.col(2)) / std::sqrt(3.0);
    CHECK((sum - r).norm() < 1e-15);
}

TEST_CASE("Ψ basis and sector bases are orthonormal and complete") {
    Eigen::Matrix<cd, 9, 9> all;
    all << psi_basis(), sector_plus_basis(), sector_minus_basis();
    CHECK((all.adjoint() * all - Matrix9cd::Identity()).norm() < 1e-14);
    CHECK((psi_basis().adjoint() * psi_basis() - Eigen::Matrix<cd, 5, 5>::Identity()).norm() < 1e-14);
}

TEST_CASE("b-operator printed instances") {
    const Matrix3cd b1 = b_operator(unit(0, 0));
    CHECK((b1 - std::sqrt(3.0) * unit(0, 0)).norm() < 1e-14);

    const double beta = 1.0, gap = 1.0;
    const Matrix3cd bg = b_operator(gibbs(beta, gap, 0.0));
    const double zb = std::exp(-beta * gap) + 2.0;  // Z_β e^{βE} with E = 0
    for (int i = 0; i < 3; ++i) {
        const double w = i == 0 ? std::exp(-beta * gap / 2) : 1.0;
        CHECK(std::abs(bg(i, i) - std::sqrt(3.0 / zb) * w) < 1e-14);
    }
    CHECK((bg - Matrix3cd(bg.diagonal().asDiagonal())).norm() < 1e-14);

    // ρ_τ: b ∝ |φ2 - φ3⟩⟨φ2 - φ3|, i.e. bφ1 = 0, bφ2 ∝ φ2 - φ3, bφ3 ∝ φ3 - φ2.
    const Matrix3cd bt = b_operator(dark_density());
    CHECK(bt.col(0).norm() < 1e-14);
    const double c = std::sqrt(3.0) / 2.0;
    CHECK((bt.col(1) - c * Vector3cd(0, 1, -1)).norm() < 1e-14);
    CHECK((bt.col(2) - c * Vector3cd(0, -1, 1)).norm() < 1e-14);
}

TEST_CASE("b-operator round trip on random states") {
    std::mt19937 rng(11);
    const Vector9cd ref = reference_vector();
    for (int n = 0; n < 20; ++n) {
        const DensityMatrix rho = random_density(rng);
        const Vector9cd psi = right_factor(b_operator(rho)) * ref;
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                const Matrix3cd a = unit(j, k);
                CHECK(std::abs(psi.dot(left_multiplication(a) * psi) - (rho * a).trace()) < 1e-12);
            }
    }
}

TEST_CASE("b-operator rejects non-PSD and clamps tiny negatives") {
    DensityMatrix bad = Matrix3cd::Zero();
    bad(0, 0) = 1.1;
    bad(1, 1) = -0.1;
    CHECK_THROWS_AS(b_operator(bad), DomainError);
    DensityMatrix slight = unit(0, 0);
    slight(1, 1) = -5e-11;
    CHECK_NOTHROW(b_operator(slight));
}

TEST_CASE("X_σ") {
    CHECK((x_sigma(standard(0.0)) - Eigen::Matrix3d::Identity()).norm() == 0.0);
    for (double s : {1e-3, 1e-5}) {
        const SystemParams p = standard(s);
        const Matrix3cd x = x_sigma(p).cast<cd>();
        CHECK((x * gibbs(p.beta, p.gap(), 0.0) * x - gibbs(p)).norm() < 1e-14);
    }
    // ‖X_σ - 1‖ ≤ βσ and the deviation is linear in σ.
    const double d4 = (x_sigma(standard(1e-4)) - Eigen::Matrix3d::Identity()).norm();
    const double d5 = (x_sigma(standard(1e-5)) - Eigen::Matrix3d::Identity()).norm();
    CHECK(d4 <= 1e-4);
    CHECK(d5 <= 1e-5);
    CHECK(d4 / d5 == doctest::Approx(10.0).epsilon(1e-3));
}

TEST_CASE("trace norm") {
    CHECK(trace_norm(Matrix3cd::Zero()) == 0.0);
    CHECK(trace_norm(unit(0, 0) - unit(1, 1)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(trace_norm(unit(0, 1)), DomainError);
    std::mt19937 rng(5);
    for (int n = 0; n < 20; ++n) {
        CHECK(trace_norm(random_density(rng) - random_density(rng)) <= 2.0 + 1e-12);
    }
}

TEST_CASE("manifold states") {
    const double beta = 1.0, gap = 1.0;
    const double pmax = manifold_p_max(beta, gap);
    CHECK((manifold_state(0.0, beta, gap) - dark_density()).norm() < 1e-15);
    const double pg = 1.0 / (1.0 + 2.0 * std::exp(beta * gap));
    CHECK((manifold_state(pg, beta, gap) - gibbs(beta, gap, 0.0)).norm() < 1e-15);
    const Vector3cd nu(0, 1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
    const Matrix3cd top = pmax * unit(0, 0) + (1 - pmax) * nu * nu.adjoint();
    CHECK((manifold_state(pmax, beta, gap) - top).norm() < 1e-15);
    for (int i = 0; i < 50; ++i) {
        const double p = pmax * i / 49.0;
        CHECK_NOTHROW(validate_density(manifold_state(p, beta, gap), {1e-15, 1e-15, 1e-15}));
    }
    CHECK_THROWS_AS(manifold_state(-0.01, beta, gap), DomainError);
    CHECK_THROWS_AS(manifold_state(pmax + 1e-6, beta, gap), DomainError);
}

TEST_CASE("manifold membership") {
    const double beta = 1.0, gap = 1.0;
    auto p = manifold_membership(dark_density(), beta, gap);
    REQUIRE(p.has_value());
    CHECK(*p == 0.0);
    CHECK_FALSE(manifold_membership(Matrix3cd::Identity() / 3.0, beta, gap).has_value());
    CHECK_FALSE(manifold_membership(gibbs(beta, gap, 0.1), beta, gap).has_value());
    CHECK(manifold_membership(gibbs(beta, gap, 0.0), beta, gap).has_value());
    CHECK(manifold_membership(manifold_state(0.2, beta, gap), beta, gap).value() == doctest::Approx(0.2));
}

TEST_CASE("final state formula") {
    const double beta = 1.0, gap = 1.0;
    const double eb = std::exp(beta * gap);
    const DensityMatrix f1 = final_state_formula(unit(0, 0), beta, gap);
    CHECK(f1(0, 0).real() == doctest::Approx(1.0 / (1.0 + eb)).epsilon(1e-15));
    CHECK(f1(1, 2).real() == doctest::Approx(eb / (2 * (eb + 1))).epsilon(1e-15));
    CHECK((final_state_formula(dark_density(), beta, gap) - dark_density()).norm() < 1e-15);
    const DensityMatrix g0 = gibbs(beta, gap, 0.0);
    CHECK((final_state_formula(g0, beta, gap) - g0).norm() < 1e-15);

    std::mt19937 rng(17);
    for (int n = 0; n < 5; ++n) {
        const DensityMatrix r = random_density(rng);
        const DensityMatrix f = final_state_formula(r, beta, gap);
        CHECK((quasi_stationary(r, beta, gap) - f).norm() == 0.0);
        CHECK((final_state_formula(f, beta, gap) - f).norm() < 1e-15);
        CHECK(manifold_membership(f, beta, gap).has_value());
    }
    // With [ρ0]23 = 0, α = ((2e^{βΔ}+1)x - 1) / (4(e^{βΔ}+1)) for x = [ρ0]11, so
    // |α| ≥ ¼(e^{βΔ}+1)^{-1} exactly when x = 0 or x ≥ 2/(2e^{βΔ}+1).
    for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        DensityMatrix r = Matrix3cd::Zero();
        r(0, 0) = x;
        r(1, 1) = r(2, 2) = 0.5 * (1.0 - x);
        const double a = std::abs(quasi_stationary(r, beta, gap)(1, 2).real());
        const bool bound = a >= 0.25 / (eb + 1.0) - 1e-15;
        CHECK(bound == (x == 0.0 || x >= 2.0 / (2.0 * eb + 1.0) - 1e-15));
    }
    CHECK(std::abs(quasi_stationary(dark_density(), beta, gap)(1, 2).real()) == doctest::Approx(0.5));
}

TEST_CASE("density validation") {
    CHECK_NOTHROW(validate_density(gibbs(1.0, 1.0, 0.0)));
    CHECK_THROWS_AS(validate_density(unit(0, 1) + unit(0, 0)), DomainError);
    CHECK_THROWS_AS(validate_density(2.0 * unit(0, 0)), DomainError);
    DensityMatrix neg = Matrix3cd::Zero();
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(validate_density(neg), DomainError);
}
