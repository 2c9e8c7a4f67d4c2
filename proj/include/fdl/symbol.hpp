// The Laplace-Fourier symbol of the rescaled kinetic equation,
//   a_eps(p,k) = (1/theta) integral [nu/(nu + theta p + i eps v.k) - 1] nu F dv,
// its drift / quadratic decomposition, the limiting coefficient kappa in the
// fractional, critical and classical regimes, and the remainder integral that
// controls the error term.
#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fdl/collision.hpp"
#include "fdl/scaling.hpp"

namespace fdl {

struct SymbolValue {
    double p = 0.0;
    Vec k;
    double eps = 0.0;
    std::complex<double> a_eps{0.0, 0.0};
    double drift_part = 0.0;   // signed: -p * integral nu(nu+theta p)/(...) F, in [-p, 0]
    double d_eps = 0.0;        // nonnegative quadratic part, theta-normalized
    double c_remainder = 0.0;  // integral |nu/(nu+theta p+i eps v.k) - 1| nu F dv
};

struct KappaValue {
    double kappa = 0.0;       // the adopted value
    double gamma = 0.0;
    std::string method;       // "quadrature" or "closed-form"
    double quadrature = 0.0;  // quadrature route (always computed)
    double closed_form = std::numeric_limits<double>::quiet_NaN();  // where derived
};

struct RemainderReport {
    std::vector<double> eps;
    std::vector<double> c;
    double slope = 0.0;
    double floor = 0.0;  // min(gamma/2, 1) - 0.02
    bool pass = false;
};

// Full symbol evaluation at (p, k, eps); all SymbolValue fields are computed
// on a shared node set, so the decomposition identity holds to roundoff.
SymbolValue a_eps(const CollisionKernel& kernel, const ScalingRegime& regime, double p,
                  const Vec& k, double eps);

// Quadratic part only.
double d_eps(const CollisionKernel& kernel, const ScalingRegime& regime, double p, const Vec& k,
             double eps);

// kappa of the fractional limit:
//   kappa0 nu0/(1-beta) * integral w1^2/(nu0^2+w1^2) |w|^{-N-gamma} dw.
// Computed by radial-angular quadrature; for N = 1 the Beta-identity closed
// form kappa0 nu0^{1-gamma} pi / ((1-beta) sin(pi gamma/2)) is cross-checked.
KappaValue kappa_fractional(const ScalingRegime& regime, double kappa0, double nu0, int dim);

// kappa of the critical (gamma = 2) limit: closed sphere-integral form
//   kappa0/((1-beta) nu0) * integral_{|v|=1} v1^2 dsigma
// plus a lambda-sweep quadrature estimate of the defining logarithmic limit.
KappaValue kappa_critical(double alpha, double beta, double kappa0, double nu0, int dim);

// -p - kappa |k|^gamma
double limit_symbol(const ScalingRegime& regime, const KappaValue& kappa, double p, const Vec& k);

// Log-log slope of the remainder integral c_eps over a geometric eps grid;
// passes when the slope reaches min(gamma/2, 1) - 0.02.
RemainderReport remainder_probe(const CollisionKernel& kernel, const ScalingRegime& regime,
                                double p, const Vec& k, const std::vector<double>& eps_list);

}  // namespace fdl
