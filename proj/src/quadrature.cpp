// quadrature.cpp — Golub–Welsch construction of Gauss–Legendre rules

#include "lambda_dyn/quadrature.hpp"

#include <map>
#include <mutex>

namespace lambda_dyn::quad {

namespace {

GaussLegendre golub_welsch(int n) {
    // Jacobi matrix of the Legendre recurrence: off-diagonal k / sqrt(4k^2 - 1).
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double b = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = b;
        jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussLegendre gl;
    gl.nodes = es.eigenvalues();
    gl.weights = 2.0 * es.eigenvectors().row(0).array().square().transpose();

    // Polish nodes with Newton on P_n and recompute weights from P_n'.
    for (int i = 0; i < n; ++i) {
        double x = gl.nodes[i];
        double dp = 1.0;
        for (int it = 0; it < 3; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
            dp = n * (x * pn - p0) / (x * x - 1.0);
            x -= pn / dp;
        }
        gl.nodes[i] = x;
        gl.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return gl;
}

} // namespace

const GaussLegendre& GaussLegendre::rule(int n) {
    if (n < 2) {
        throw DomainError("Gauss–Legendre rule needs at least 2 points");
    }
    static std::mutex mutex;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, golub_welsch(n)).first;
    }
    return it->second;
}

} // namespace lambda_dyn::quad
