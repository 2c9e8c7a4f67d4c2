// Heavy-tailed equilibrium distributions F(v) = F0(v) ell(|v|) with
// |v|^{N+alpha} F0 -> kappa0.  Profiles are radial: a bounded core below
// r_cut glued to the power-law tail, or a globally smooth algebraic shape.
// Construction normalizes F to unit mass; evaluation, moments, the radial
// CDF and exact sampling all refer to the normalized density.
#pragma once

#include <memory>
#include <vector>

#include "fdl/common.hpp"
#include "fdl/rng.hpp"
#include "fdl/slowly_varying.hpp"

namespace fdl {

enum class CoreKind {
    Uniform,     // constant level on |v| <= r_cut, glued continuously to the tail
    Maxwellian,  // A exp(-|v|^2/2) on |v| <= r_cut, glued continuously
    Smooth,      // F0 = kappa0 (1+|v|^2)^{-(N+alpha)/2} everywhere (no glue)
};

// A possibly infinite moment; infinity is a tag, never a floating overflow.
struct MomentValue {
    bool finite = true;
    double value = 0.0;
};

// Surface measure of the unit sphere in R^N (two points for N = 1).
double sphere_area(int dim);

class HeavyTailEquilibrium {
public:
    HeavyTailEquilibrium(int dim, double alpha, double kappa0, SlowlyVarying ell,
                         CoreKind core, double r_cut, bool tail_exact);

    static HeavyTailEquilibrium uniform_core(int dim, double alpha, double kappa0 = 1.0,
                                             double r_cut = 1.0,
                                             SlowlyVarying ell = SlowlyVarying::constant());
    static HeavyTailEquilibrium maxwellian_core(int dim, double alpha, double kappa0,
                                                double r_cut,
                                                SlowlyVarying ell = SlowlyVarying::constant());
    static HeavyTailEquilibrium smooth_profile(int dim, double alpha, double kappa0 = 1.0,
                                               SlowlyVarying ell = SlowlyVarying::constant());
    // Maxwellian core scaled so the bulk equals the standard normal density,
    // with the power tail glued at r_cut (negligible mass there for large
    // r_cut).  The workhorse for classical-regime experiments.
    static HeavyTailEquilibrium gaussian_bulk(int dim, double alpha, double r_cut);

    int dim() const { return dim_; }
    double alpha() const { return alpha_; }
    double r_cut() const { return r_cut_; }
    bool tail_exact() const { return tail_exact_; }
    CoreKind core_kind() const { return core_; }
    const SlowlyVarying& ell() const { return ell_; }

    // Normalization constant Z = integral of the raw profile.
    double normalization() const { return norm_; }
    // Raw tail constant kappa0 of the un-normalized profile.
    double tail_constant_raw() const { return kappa0_; }
    // Tail constant of the normalized density (kappa0 / Z); this is the
    // kappa0 entering every limit-coefficient formula.
    double tail_constant() const { return kappa0_ / norm_; }

    // Normalized density.
    double eval(const Vec& v) const;
    double eval_radial(double r) const;
    // Raw (pre-normalization) radial profile.
    double eval_raw_radial(double r) const;
    // F0 = F/ell of the normalized density, as a radial function.
    double f0_radial(double r) const;

    // integral |v|^a F dv, finite quadrature plus analytic tail term
    MomentValue moment(double a) const;

    // CDF of |v| under F.
    double radial_cdf(double r) const;

    // n i.i.d. draws from F; deterministic in (seed); draw i depends only on
    // (seed, i), so any partitioning across workers yields identical output.
    std::vector<Vec> sample(uint64_t seed, std::size_t n) const;
    // Single draw from the stream identified by (seed, stream).
    Vec sample_one(uint64_t seed, uint64_t stream) const;
    // Draw using an existing stream (consumes a variable number of uniforms).
    Vec sample_with(RandomStream& rng) const;

private:
    struct RadialSampler;

    double core_radial(double r) const;  // raw core profile value
    double tail_radial(double r) const;  // raw tail profile value
    void build_sampler();

    int dim_;
    double alpha_;
    double kappa0_;
    SlowlyVarying ell_;
    CoreKind core_;
    double r_cut_;
    bool tail_exact_;
    double core_level_ = 1.0;  // continuity constant of the glued core
    double norm_ = 1.0;
    double core_mass_raw_ = 0.0;  // raw mass below r_cut (not for Smooth)
    std::shared_ptr<const RadialSampler> sampler_;
};

}  // namespace fdl
