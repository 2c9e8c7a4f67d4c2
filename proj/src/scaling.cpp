#include "fdl/scaling.hpp"

#include <cmath>
#include <sstream>

namespace fdl {

namespace {
constexpr double kCriticalTol = 1e-12;  // tolerance for beta == 2 - alpha
}

double ScalingRegime::phi(double eps) const {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("phi: eps must lie in (0,1)");
    return ell(std::pow(eps, -1.0 / (1.0 - beta)));
}

double ScalingRegime::theta(double eps) const {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("theta: eps must lie in (0,1)");
    switch (kind) {
        case RegimeKind::Fractional:
            return phi(eps) * std::pow(eps, gamma);
        case RegimeKind::Critical:
            return eps * eps * phi(eps) * std::log(1.0 / eps);
        case RegimeKind::Classical:
            return eps * eps;
    }
    return eps * eps;
}

std::string ScalingRegime::kind_name() const {
    switch (kind) {
        case RegimeKind::Fractional:
            return "fractional";
        case RegimeKind::Critical:
            return "critical";
        case RegimeKind::Classical:
            return "classical";
    }
    return "?";
}

std::string ScalingRegime::theta_formula() const {
    std::ostringstream os;
    const double ex = 1.0 / (1.0 - beta);
    switch (kind) {
        case RegimeKind::Fractional:
            os << "theta(eps) = ell(eps^-" << ex << ") * eps^" << gamma;
            break;
        case RegimeKind::Critical:
            os << "theta(eps) = eps^2 * ell(eps^-" << ex << ") * ln(1/eps)";
            break;
        case RegimeKind::Classical:
            os << "theta(eps) = eps^2";
            break;
    }
    return os.str();
}

ScalingRegime classify(double alpha, double beta, const SlowlyVarying& ell) {
    if (!(alpha > 0.0)) throw UnsupportedRegime("classify: requires alpha > 0");
    if (alpha == 1.0 && beta == 1.0)
        throw UnsupportedRegime("classify: the corner alpha = beta = 1 is excluded");
    if (!(beta < 1.0))
        throw UnsupportedRegime("classify: requires beta < 1 (violated: beta >= 1)");
    if (!(beta < alpha))
        throw UnsupportedRegime("classify: requires beta < alpha (violated: beta >= alpha)");

    ScalingRegime r;
    r.alpha = alpha;
    r.beta = beta;
    r.ell = ell;

    const double crit = 2.0 - alpha;
    if (std::abs(beta - crit) <= kCriticalTol * std::max(1.0, std::abs(crit))) {
        // gamma = 2 boundary (alpha > 1 here, since beta = 2 - alpha < 1)
        r.gamma = 2.0;
        if (ell.ell_log_diverges()) {
            r.kind = RegimeKind::Critical;
        } else {
            // finite second moment: the classical limit applies on eps^2
            r.kind = RegimeKind::Classical;
            r.critical_log_fallback = true;
        }
        return r;
    }
    if (beta < crit) {
        r.kind = RegimeKind::Fractional;
        r.gamma = (alpha - beta) / (1.0 - beta);
        return r;
    }
    // beta > 2 - alpha (gamma would exceed 2): classical diffusion
    r.kind = RegimeKind::Classical;
    r.gamma = 2.0;
    return r;
}

}  // namespace fdl
