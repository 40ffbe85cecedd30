// quadrature.hpp — Gauss rules and composite panel rules used by the
// interaction integrals and their oracles.

#pragma once

#include <vector>

#include "tcgs/types.hpp"

namespace tcgs {

struct Rule1D {
    RealVector nodes;
    RealVector weights;
};

/// Gauss–Hermite rule for ∫ f(x) e^{-x^2} dx, exact for polynomials of
/// degree <= 2n-1. Nodes ascending.
Rule1D gauss_hermite(int n);

/// Same nodes with weights w_i e^{x_i^2}, for integrating functions that
/// already carry their Gaussian decay.
Rule1D gauss_hermite_unweighted(int n);

/// Gauss–Legendre rule on [-1, 1].
Rule1D gauss_legendre(int n);

/// Composite Gauss–Legendre over consecutive panels.
Rule1D panel_rule(const std::vector<double>& breakpoints, int nodes_per_panel);

/// Breakpoints for a radial rule on [0, rmax]: dyadic refinement towards 0
/// below min(1, rmax), then uniform panels of width `step`.
std::vector<double> radial_breakpoints(double rmax, int dyadic_levels, double step);

} // namespace tcgs
