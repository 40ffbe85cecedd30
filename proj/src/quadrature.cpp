#include "tcgs/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "tcgs/oscillator.hpp"

namespace tcgs {

namespace {

// Golub–Welsch: nodes are eigenvalues of the Jacobi matrix, weights are
// mu0 * (first eigenvector component)^2.
Rule1D golub_welsch(const RealVector& offdiag, double mu0)
{
    const int n = static_cast<int>(offdiag.size()) + 1;
    RealMatrix jacobi = RealMatrix::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        jacobi(k, k + 1) = offdiag(k);
        jacobi(k + 1, k) = offdiag(k);
    }
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(jacobi);
    Rule1D rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int k = 0; k < n; ++k) {
        const double v0 = es.eigenvectors()(0, k);
        rule.weights(k) = mu0 * v0 * v0;
    }
    return rule;
}

} // namespace

Rule1D gauss_hermite(int n)
{
    Rule1D rule = gauss_hermite_unweighted(n);
    for (int k = 0; k < n; ++k) {
        rule.weights(k) *= std::exp(-rule.nodes(k) * rule.nodes(k));
    }
    return rule;
}

Rule1D gauss_hermite_unweighted(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_hermite: n >= 1 required");
    RealVector b(n - 1);
    for (int k = 1; k < n; ++k) b(k - 1) = std::sqrt(0.5 * k);
    Rule1D rule = golub_welsch(b, std::sqrt(std::numbers::pi));
    // Eigenvector first components underflow at the edge nodes, so take the
    // weights from the Christoffel function instead:
    //   w_i e^{x_i^2} = 1 / sum_{k<n} h_k(x_i)^2
    // with h_k the normalized Hermite functions (stable recurrence).
    for (int i = 0; i < n; ++i) {
        rule.weights(i) = 1.0 / hermite_function_table(n - 1, rule.nodes(i)).squaredNorm();
    }
    return rule;
}

Rule1D gauss_legendre(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
    RealVector b(n - 1);
    for (int k = 1; k < n; ++k) b(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(b, 2.0);
}

Rule1D panel_rule(const std::vector<double>& breakpoints, int nodes_per_panel)
{
    if (breakpoints.size() < 2) throw std::invalid_argument("panel_rule: need at least one panel");
    const Rule1D base = gauss_legendre(nodes_per_panel);
    const int npanels = static_cast<int>(breakpoints.size()) - 1;
    Rule1D rule;
    rule.nodes.resize(npanels * nodes_per_panel);
    rule.weights.resize(npanels * nodes_per_panel);
    int out = 0;
    for (int p = 0; p < npanels; ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        if (!(b > a)) throw std::invalid_argument("panel_rule: breakpoints must be ascending");
        const double mid = 0.5 * (a + b);
        const double half = 0.5 * (b - a);
        for (int k = 0; k < nodes_per_panel; ++k, ++out) {
            rule.nodes(out) = mid + half * base.nodes(k);
            rule.weights(out) = half * base.weights(k);
        }
    }
    return rule;
}

std::vector<double> radial_breakpoints(double rmax, int dyadic_levels, double step)
{
    if (!(rmax > 0.0)) throw std::invalid_argument("radial_breakpoints: rmax > 0 required");
    std::vector<double> pts;
    const double knee = std::min(1.0, rmax);
    pts.push_back(0.0);
    for (int j = dyadic_levels; j >= 0; --j) {
        pts.push_back(knee * std::ldexp(1.0, -j));
    }
    double r = knee;
    while (r + step < rmax) {
        r += step;
        pts.push_back(r);
    }
    if (pts.back() < rmax) pts.push_back(rmax);
    return pts;
}

} // namespace tcgs
