#include "fdl/symbol.hpp"

#include <cmath>

#include "fdl/quadrature.hpp"

namespace fdl {

namespace {

// Accumulates the four symbol integrals over one radial direction pair
// (+/- u), at effective wavenumber keff = |k| |cos angle|.
struct RadialAccum {
    double drift = 0.0;    // integral nu (nu + theta p) / D * nu-weight F
    double quad = 0.0;     // integral (eps v.k)^2 / D * nu F
    double c_abs = 0.0;    // integral |...| nu F
    std::complex<double> a{0.0, 0.0};
};

struct SymbolProblem {
    const CollisionKernel* kernel;
    double theta;
    double p;
    double eps;
    double beta;
};

// complex contribution of the +/- node pair at radius r with measure weight
// already applied outside; x = eps * r * keff
void accumulate_pair(const SymbolProblem& pr, double r, double keff, double measure,
                     RadialAccum& acc) {
    const double nu = pr.kernel->nu_radial_cached(r);
    const double F = pr.kernel->equilibrium().eval_radial(r);
    const double x = pr.eps * r * keff;
    const double np = nu + pr.theta * pr.p;
    const double D = np * np + x * x;
    const double nuF = nu * F * measure;
    acc.drift += 2.0 * np / D * nuF;
    acc.quad += 2.0 * x * x / D * nuF;
    acc.c_abs += 2.0 * std::sqrt(pr.theta * pr.p * pr.theta * pr.p + x * x) / std::sqrt(D) * nuF;
    // the same pair evaluated as complex conjugates: the imaginary parts
    // cancel exactly when the grid symmetry is implemented correctly
    const std::complex<double> den_p(np, x), den_m(np, -x);
    acc.a += (nu / den_p - 1.0) * nuF + (nu / den_m - 1.0) * nuF;
}

// Integrate the symbol over radius for one angular factor u (in (0, 1]) of a
// dim-dimensional problem; "measure" carries r^{N-1} and angular weights.
void radial_integrals(const SymbolProblem& pr, double kabs, double u, double ang_weight, int dim,
                      RadialAccum& out) {
    const double keff = kabs * u;
    const double rc = pr.kernel->equilibrium().r_cut();
    const double rel = 1e-9;

    auto add_at = [&](double r, double dr_weight) {
        accumulate_pair(pr, r, keff, ang_weight * std::pow(r, dim - 1) * dr_weight, out);
    };

    // core [0, r_cut]: smooth, no oscillation scale at these eps
    {
        const GaussLegendre& gl = gauss_legendre(48);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double r = 0.5 * rc * (1.0 + gl.nodes[i]);
            add_at(r, 0.5 * rc * gl.weights[i]);
        }
    }

    if (keff <= 0.0) {
        // no oscillation scale: direct geometric panels in r until the tail
        // stops contributing
        double lo = rc;
        double base = std::abs(out.drift) + std::abs(out.quad) + std::abs(out.c_abs) + 1e-300;
        int quiet = 0;
        for (int oct = 0; oct < 600 && quiet < 3; ++oct) {
            const double hi = 2.0 * lo;
            RadialAccum before = out;
            const GaussLegendre& gl = gauss_legendre(16);
            for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
                const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.nodes[i];
                add_at(r, 0.5 * (hi - lo) * gl.weights[i]);
            }
            const double delta = std::abs(out.drift - before.drift) +
                                 std::abs(out.quad - before.quad) +
                                 std::abs(out.c_abs - before.c_abs);
            base = std::abs(out.drift) + std::abs(out.quad) + std::abs(out.c_abs) + 1e-300;
            if (delta <= rel * base) ++quiet;
            else quiet = 0;
            lo = hi;
        }
        return;
    }

    // tail [r_cut, inf): substitute w = eps*keff*r^{1-beta} (the scale on
    // which the quadratic part saturates); panels geometric in w
    const double q = 1.0 - pr.beta;
    const double scale = pr.eps * keff;
    const double w_lo = scale * std::pow(rc, q);
    const double nu0 = pr.kernel->nu0();
    const double w_hi_anchor = 64.0 * std::max(1.0, nu0);

    auto add_w_range = [&](double wa, double wb, int n) {
        const GaussLegendre& gl = gauss_legendre(n);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double w = 0.5 * (wa + wb) + 0.5 * (wb - wa) * gl.nodes[i];
            const double r = std::pow(w / scale, 1.0 / q);
            const double drdw = r / (q * w);
            add_at(r, 0.5 * (wb - wa) * gl.weights[i] * drdw);
        }
    };

    // from w_lo up through the transition region
    double lo = w_lo;
    while (lo < w_hi_anchor) {
        const double hi = std::min(2.0 * lo, w_hi_anchor);
        add_w_range(lo, hi, 24);
        lo = hi;
    }
    // beyond the transition: keep doubling until contributions vanish
    double base = std::abs(out.drift) + std::abs(out.quad) + std::abs(out.c_abs) + 1e-300;
    int quiet = 0;
    for (int oct = 0; oct < 600 && quiet < 3; ++oct) {
        RadialAccum before = out;
        add_w_range(lo, 2.0 * lo, 16);
        const double delta = std::abs(out.drift - before.drift) +
                             std::abs(out.quad - before.quad) +
                             std::abs(out.c_abs - before.c_abs);
        base = std::abs(out.drift) + std::abs(out.quad) + std::abs(out.c_abs) + 1e-300;
        if (delta <= 1e-10 * base) ++quiet;
        else quiet = 0;
        lo *= 2.0;
    }
}

}  // namespace

SymbolValue a_eps(const CollisionKernel& kernel, const ScalingRegime& regime, double p,
                  const Vec& k, double eps) {
    if (!(p >= 0.0)) throw InvalidInput("a_eps: p must be >= 0");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("a_eps: eps must lie in (0,1)");
    if (!k.finite()) throw InvalidInput("a_eps: non-finite wave vector");
    const int dim = kernel.equilibrium().dim();
    if (k.dim != dim) throw InvalidInput("a_eps: wave vector dimension mismatch");

    SymbolProblem pr{&kernel, regime.theta(eps), p, eps, kernel.beta()};

    RadialAccum acc;
    const double kabs = k.norm();
    if (dim == 1) {
        // the +/- pair is handled inside accumulate_pair; measure weight 1
        radial_integrals(pr, kabs, 1.0, 1.0, 1, acc);
    } else if (dim == 2) {
        // angular reduction: integrand depends on |cos phi|; quarter circle
        // suffices, matching pairs supply the rest
        const GaussLegendre& gl = gauss_legendre(24);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double phi = 0.25 * M_PI * (1.0 + gl.nodes[i]);  // (0, pi/2)
            const double w = 0.25 * M_PI * gl.weights[i] * 4.0;    // 4 quadrants
            radial_integrals(pr, kabs, std::cos(phi), w, 2, acc);
        }
    } else {
        // dim 3: sphere integral reduces to u = cos(theta) in (0,1), factor
        // 2 for the lower hemisphere, 2 pi from the azimuth
        const GaussLegendre& gl = gauss_legendre(24);
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double u = 0.5 * (1.0 + gl.nodes[i]);
            const double w = 0.5 * gl.weights[i] * 2.0 * 2.0 * M_PI;
            radial_integrals(pr, kabs, u, w, 3, acc);
        }
    }

    SymbolValue out;
    out.p = p;
    out.k = k;
    out.eps = eps;
    out.drift_part = -p * acc.drift;
    out.d_eps = acc.quad / pr.theta;
    out.c_remainder = acc.c_abs;
    out.a_eps = acc.a / pr.theta;
    return out;
}

double d_eps(const CollisionKernel& kernel, const ScalingRegime& regime, double p, const Vec& k,
             double eps) {
    return a_eps(kernel, regime, p, k, eps).d_eps;
}

// ---------------------------------------------------------------------------
// kappa
// ---------------------------------------------------------------------------

namespace {

// integral over the unit sphere of |omega_1|^g
double sphere_moment(int dim, double g) {
    switch (dim) {
        case 1:
            return 2.0;
        case 2: {
            auto f = [&](double phi) { return std::pow(std::cos(phi), g); };
            return 4.0 * integrate(f, 0.0, 0.5 * M_PI, 1e-12).value;
        }
        case 3: {
            auto f = [&](double u) { return std::pow(u, g); };
            return 4.0 * M_PI * integrate(f, 0.0, 1.0, 1e-12).value;
        }
        default:
            throw InvalidInput("sphere_moment: dim must be 1, 2 or 3");
    }
}

// radial factor integral t^{1-gamma}/(nu0^2 + t^2) dt over (0, inf),
// integrable singularity at 0 for gamma in (0, 2)
double radial_kappa_integral(double gamma, double nu0) {
    const double split = nu0;
    // substitution t = s^{1/(2-gamma)} regularizes the origin
    const double q = 2.0 - gamma;
    auto g = [&](double s) {
        const double t = std::pow(s, 1.0 / q);
        return 1.0 / (nu0 * nu0 + t * t) / q;
    };
    const double part1 = integrate(g, 0.0, std::pow(split, q), 1e-12).value;
    auto f = [&](double t) { return std::pow(t, 1.0 - gamma) / (nu0 * nu0 + t * t); };
    const double part2 = integrate_to_infinity(f, split, 1e-12).value;
    return part1 + part2;
}

}  // namespace

KappaValue kappa_fractional(const ScalingRegime& regime, double kappa0, double nu0, int dim) {
    const double gamma = regime.gamma;
    if (!(gamma > 0.0 && gamma < 2.0))
        throw UnsupportedRegime("kappa_fractional: gamma must lie in (0,2)");
    if (!(kappa0 > 0.0 && nu0 > 0.0)) throw InvalidInput("kappa_fractional: kappa0, nu0 > 0");

    // radial-angular quadrature: the w1^2/(nu0^2+w1^2) |w|^{-N-gamma} integral
    // factorizes into |omega_1|^gamma on the sphere times a radial integral
    const double front = kappa0 * nu0 / (1.0 - regime.beta);
    const double radial = std::pow(nu0, -gamma) * radial_kappa_integral(gamma, 1.0);
    const double quad = front * sphere_moment(dim, gamma) * radial;

    KappaValue out;
    out.gamma = gamma;
    out.quadrature = quad;
    out.method = "quadrature";
    if (dim == 1) {
        out.closed_form = kappa0 * std::pow(nu0, 1.0 - gamma) * M_PI /
                          ((1.0 - regime.beta) * std::sin(0.5 * M_PI * gamma));
        out.method = "closed-form";
        out.kappa = out.closed_form;
    } else {
        out.kappa = quad;
    }
    if (!(out.kappa > 0.0)) throw NumericalFailure("kappa_fractional: non-positive kappa");
    return out;
}

KappaValue kappa_critical(double alpha, double beta, double kappa0, double nu0, int dim) {
    if (!(alpha > 1.0) || std::abs(beta - (2.0 - alpha)) > 1e-9)
        throw UnsupportedRegime("kappa_critical: requires alpha > 1 and beta = 2 - alpha");
    if (!(kappa0 > 0.0 && nu0 > 0.0)) throw InvalidInput("kappa_critical: kappa0, nu0 > 0");

    KappaValue out;
    out.gamma = 2.0;
    out.closed_form = kappa0 / ((1.0 - beta) * nu0) * sphere_moment(dim, 2.0);
    out.method = "closed-form";
    out.kappa = out.closed_form;

    // lambda-sweep quadrature of the defining logarithmic limit
    const double lambda = 1e-6;
    double psi = 0.0;
    if (dim == 1) {
        auto f = [&](double r) { return 2.0 / (r * (nu0 * nu0 + r * r)); };
        psi = kappa0 * nu0 * (integrate(f, lambda, 1.0, 1e-12).value +
                              integrate_to_infinity(f, 1.0, 1e-12).value);
    } else {
        // angular x radial with integrand u^2 / (r (nu0^2 + r^2 u^2))
        auto outer = [&](double u) {
            auto f = [&](double r) { return u * u / (r * (nu0 * nu0 + r * r * u * u)); };
            return integrate(f, lambda, 1.0, 1e-11).value +
                   integrate_to_infinity(f, 1.0, 1e-11).value;
        };
        if (dim == 2) {
            auto g = [&](double phi) { return outer(std::cos(phi)); };
            psi = kappa0 * nu0 * 4.0 * integrate(g, 1e-12, 0.5 * M_PI - 1e-12, 1e-10).value;
        } else {
            auto g = [&](double u) { return outer(u); };
            psi = kappa0 * nu0 * 4.0 * M_PI * integrate(g, 1e-12, 1.0, 1e-10).value;
        }
    }
    out.quadrature = psi / std::log(1.0 / lambda) / (1.0 - beta);
    return out;
}

double limit_symbol(const ScalingRegime& regime, const KappaValue& kappa, double p, const Vec& k) {
    return -p - kappa.kappa * std::pow(k.norm(), regime.gamma);
}

RemainderReport remainder_probe(const CollisionKernel& kernel, const ScalingRegime& regime,
                                double p, const Vec& k, const std::vector<double>& eps_list) {
    if (regime.kind == RegimeKind::Classical && !regime.critical_log_fallback)
        throw UnsupportedRegime("remainder_probe: fractional or critical regime required");
    if (eps_list.size() < 2) throw InvalidInput("remainder_probe: need at least 2 eps values");
    for (std::size_t i = 2; i < eps_list.size(); ++i) {
        const double r1 = eps_list[i - 1] / eps_list[i - 2];
        const double r2 = eps_list[i] / eps_list[i - 1];
        if (std::abs(std::log(r2 / r1)) > 1e-9)
            throw InvalidInput("remainder_probe: eps grid must be geometric");
    }

    RemainderReport rep;
    rep.floor = std::min(0.5 * regime.gamma, 1.0) - 0.02;
    for (double e : eps_list) {
        rep.eps.push_back(e);
        rep.c.push_back(a_eps(kernel, regime, p, k, e).c_remainder);
    }
    bool all_zero = true;
    for (double c : rep.c) all_zero = all_zero && c < 1e-300;
    if (all_zero) {
        rep.slope = std::numeric_limits<double>::infinity();
        rep.pass = true;
        return rep;
    }
    // least-squares slope of log c against log eps
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.c.size());
    for (std::size_t i = 0; i < rep.c.size(); ++i) {
        const double x = std::log(rep.eps[i]), y = std::log(rep.c[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    rep.pass = rep.slope >= rep.floor;
    return rep;
}

}  // namespace fdl
