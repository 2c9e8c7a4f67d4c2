// One-dimensional quadrature building blocks: Gauss-Legendre panel rules,
// an adaptive Gauss-Kronrod integrator, and semi-infinite helpers for
// integrands with power-law decay.
#pragma once

#include <functional>
#include <vector>

#include "fdl/common.hpp"

namespace fdl {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
// Computed once per order and cached.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLegendre& gauss_legendre(int n);

// Fixed-order Gauss-Legendre on [a, b].
template <typename Fn>
double gl_integrate(Fn&& f, double a, double b, int n) {
    const GaussLegendre& gl = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) s += gl.weights[i] * f(mid + half * gl.nodes[i]);
    return half * s;
}

// Appends the mapped nodes/weights of a GL rule on [a, b].
void gl_panel(double a, double b, int n, std::vector<double>& x, std::vector<double>& w);

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // error estimate
    bool converged = true;
};

// Adaptive Gauss-Kronrod 7-15 on a finite interval.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double rel_tol = 1e-10, double abs_tol = 0.0, int max_panels = 4000);

// Integral over [a, inf) of an integrand with (at least) power-law decay.
// Geometric panels of ratio 2 are accumulated until the running tail is
// negligible relative to the total.
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a,
                                 double rel_tol = 1e-10, int max_doublings = 720);

// Integral over [a, b] of g(u) = f(u) * |u - s|^beta with an integrable
// algebraic singularity at s (beta > -1), s inside or at the edge of [a, b].
// f must be smooth.  Used by kernels of the form |v - v'|^beta.
QuadResult integrate_with_algebraic_singularity(const std::function<double(double)>& f,
                                                double a, double b, double s, double beta,
                                                double rel_tol = 1e-10);

}  // namespace fdl
