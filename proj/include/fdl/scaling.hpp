// Regime classification for the (alpha, beta, ell) parameter space and the
// matching anomalous time scales theta(eps).
#pragma once

#include <string>

#include "fdl/common.hpp"
#include "fdl/slowly_varying.hpp"

namespace fdl {

enum class RegimeKind { Fractional, Critical, Classical };

struct ScalingRegime {
    RegimeKind kind = RegimeKind::Classical;
    double gamma = 2.0;  // order of the limit operator (2 for critical/classical)
    double alpha = 2.0;
    double beta = 0.0;
    SlowlyVarying ell = SlowlyVarying::constant();
    // Critical classification needs ell(r) ln(r) -> infinity; when it fails
    // the regime falls back to classical and this flag records the fallback.
    bool critical_log_fallback = false;

    // phi(eps) = ell(eps^{-1/(1-beta)})
    double phi(double eps) const;
    // Fractional: phi eps^gamma; critical: eps^2 phi ln(1/eps); classical: eps^2.
    double theta(double eps) const;

    std::string kind_name() const;
    std::string theta_formula() const;
};

// Classify per the limit theorems.  Requires alpha > 0 and
// beta < min(1, alpha); everything else is outside the covered map.
ScalingRegime classify(double alpha, double beta, const SlowlyVarying& ell);

}  // namespace fdl
