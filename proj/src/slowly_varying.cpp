#include "fdl/slowly_varying.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fdl {

SlowlyVarying::SlowlyVarying(SlowlyVaryingKind k, double param) : kind_(k), param_(param) {}

SlowlyVarying SlowlyVarying::constant(double c) {
    if (!(c > 0.0)) throw InvalidInput("slowly varying constant must be positive");
    SlowlyVarying f(SlowlyVaryingKind::Constant, c);
    f.potter_c_ = 1.0;
    return f;
}

SlowlyVarying SlowlyVarying::power_of_log(double p) {
    SlowlyVarying f(SlowlyVaryingKind::PowerOfLog, p);
    f.calibrate_potter_constant();
    return f;
}

SlowlyVarying SlowlyVarying::iterated_log() {
    SlowlyVarying f(SlowlyVaryingKind::IteratedLog, 0.0);
    f.calibrate_potter_constant();
    return f;
}

SlowlyVarying SlowlyVarying::tabulated(std::vector<std::pair<double, double>> samples,
                                       bool ell_ln_diverges) {
    if (samples.size() < 2) throw InvalidInput("tabulated ell needs at least 2 samples");
    for (auto& [s, v] : samples)
        if (!(s > 0.0) || !(v > 0.0)) throw InvalidInput("tabulated ell samples must be positive");
    if (!std::is_sorted(samples.begin(), samples.end(),
                        [](auto& a, auto& b) { return a.first < b.first; }))
        throw InvalidInput("tabulated ell samples must be increasing in s");
    SlowlyVarying f(SlowlyVaryingKind::Tabulated, 0.0);
    f.table_.reserve(samples.size());
    for (auto& [s, v] : samples) f.table_.emplace_back(std::log(s), std::log(v));
    f.tabulated_ell_ln_diverges_ = ell_ln_diverges;
    f.calibrate_potter_constant();
    return f;
}

double SlowlyVarying::operator()(double s) const {
    if (!(s >= 0.0) || !std::isfinite(s)) throw InvalidInput("ell evaluated at non-finite s");
    switch (kind_) {
        case SlowlyVaryingKind::Constant:
            return param_;
        case SlowlyVaryingKind::PowerOfLog:
            return std::pow(std::log(M_E + s), param_);
        case SlowlyVaryingKind::IteratedLog:
            return std::log(M_E + std::log(M_E + s));
        case SlowlyVaryingKind::Tabulated: {
            const double ls = std::log(std::max(s, 1e-300));
            if (ls <= table_.front().first) return std::exp(table_.front().second);
            if (ls >= table_.back().first) return std::exp(table_.back().second);
            auto it = std::lower_bound(table_.begin(), table_.end(), ls,
                                       [](auto& a, double v) { return a.first < v; });
            auto prev = it - 1;
            const double t = (ls - prev->first) / (it->first - prev->first);
            return std::exp(prev->second + t * (it->second - prev->second));
        }
    }
    return 1.0;
}

bool SlowlyVarying::ell_log_diverges() const {
    switch (kind_) {
        case SlowlyVaryingKind::Constant:
            return true;  // c * ln r -> infinity
        case SlowlyVaryingKind::PowerOfLog:
            return param_ > -1.0;  // (ln r)^{p+1} -> infinity iff p > -1
        case SlowlyVaryingKind::IteratedLog:
            return true;
        case SlowlyVaryingKind::Tabulated:
            return tabulated_ell_ln_diverges_;
    }
    return true;
}

void SlowlyVarying::set_potter(double delta, double scale) {
    if (!(delta > 0.0) || !(scale > 0.0)) throw InvalidInput("potter delta/scale must be positive");
    potter_delta_ = delta;
    potter_scale_ = scale;
    calibrate_potter_constant();
}

void SlowlyVarying::calibrate_potter_constant() {
    if (kind_ == SlowlyVaryingKind::Constant) {
        potter_c_ = 1.0;
        return;
    }
    // scan a wide geometric (s, lambda) lattice and keep the observed sup
    double c = 0.0;
    for (double s = potter_scale_; s <= 1e12; s *= 4.0) {
        for (double lam = potter_scale_ / s; lam <= 1e12; lam *= 4.0) {
            const double ratio = (*this)(lam * s) / (*this)(s);
            c = std::max(c, ratio / (1.0 + std::pow(lam, potter_delta_)));
        }
    }
    potter_c_ = c * 1.05;  // headroom for points between lattice samples
}

PotterReport SlowlyVarying::potter_check(
    const std::vector<std::pair<double, double>>& samples) const {
    if (samples.empty()) throw InvalidInput("potter_check: empty sample set");
    PotterReport rep;
    for (const auto& [s, lam] : samples) {
        if (s < potter_scale_ || lam < potter_scale_ / s)
            throw InvalidInput("potter_check: sample outside the Potter domain");
        const double ratio = (*this)(lam * s) / (*this)(s);
        rep.c_observed = std::max(rep.c_observed, ratio / (1.0 + std::pow(lam, potter_delta_)));
    }
    rep.pass = rep.c_observed <= potter_c_ * (1.0 + 1e-12);
    return rep;
}

std::string SlowlyVarying::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case SlowlyVaryingKind::Constant:
            os << "const(" << param_ << ")";
            break;
        case SlowlyVaryingKind::PowerOfLog:
            os << "log^" << param_;
            break;
        case SlowlyVaryingKind::IteratedLog:
            os << "loglog";
            break;
        case SlowlyVaryingKind::Tabulated:
            os << "tabulated[" << table_.size() << "]";
            break;
    }
    return os.str();
}

}  // namespace fdl
