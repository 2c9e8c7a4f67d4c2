// Slowly varying functions ell(s) modulating the equilibrium tail, with
// Potter-bound bookkeeping.  The shipped family covers constants, real
// powers of the logarithm, and the iterated logarithm; tabulated data is
// accepted for everything else.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fdl/common.hpp"

namespace fdl {

enum class SlowlyVaryingKind { Constant, PowerOfLog, IteratedLog, Tabulated };

struct PotterReport {
    double c_observed = 0.0;
    bool pass = false;
};

class SlowlyVarying {
public:
    // ell(s) = c
    static SlowlyVarying constant(double c = 1.0);
    // ell(s) = (ln(e + s))^p, shifted by e so s = 0 is regular
    static SlowlyVarying power_of_log(double p);
    // ell(s) = ln(e + ln(e + s))
    static SlowlyVarying iterated_log();
    // log-log interpolation through (s, ell(s)) samples, s increasing.
    // ell_ln_diverges must state whether ell(r) ln r -> infinity, which
    // cannot be decided from finitely many samples.
    static SlowlyVarying tabulated(std::vector<std::pair<double, double>> samples,
                                   bool ell_ln_diverges);

    double operator()(double s) const;

    SlowlyVaryingKind kind() const { return kind_; }
    double param() const { return param_; }
    bool is_constant_one() const { return kind_ == SlowlyVaryingKind::Constant && param_ == 1.0; }

    // Whether ell(r) ln(r) -> infinity (decides critical vs classical when
    // gamma = 2).  Analytic for the shipped family.
    bool ell_log_diverges() const;

    // Potter bound parameters: ell(lambda s)/ell(s) <= C (1 + lambda^delta)
    // for s >= potter_scale and lambda >= potter_scale/s.
    double potter_delta() const { return potter_delta_; }
    double potter_scale() const { return potter_scale_; }
    double potter_constant() const { return potter_c_; }
    void set_potter(double delta, double scale);

    // Smallest C satisfying the bound on the given (s, lambda) samples, and
    // a pass flag against the stored constant.
    PotterReport potter_check(const std::vector<std::pair<double, double>>& samples) const;

    std::string describe() const;

private:
    SlowlyVarying(SlowlyVaryingKind k, double param);

    void calibrate_potter_constant();

    SlowlyVaryingKind kind_;
    double param_ = 1.0;  // c for Constant, p for PowerOfLog
    std::vector<std::pair<double, double>> table_;  // log s -> log ell
    bool tabulated_ell_ln_diverges_ = false;

    double potter_delta_ = 0.25;
    double potter_scale_ = 2.0;
    double potter_c_ = 1.0;
};

}  // namespace fdl
