#include "fdl/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/quadrature.hpp"
#include "fdl/rng.hpp"

namespace fdl {

double sphere_area(int dim) {
    switch (dim) {
        case 1:
            return 2.0;  // counting measure on {-1, +1}
        case 2:
            return 2.0 * M_PI;
        case 3:
            return 4.0 * M_PI;
        default:
            throw InvalidInput("sphere_area: dim must be 1, 2 or 3");
    }
}

namespace {

// Monotone cubic Hermite interpolation (Fritsch-Carlson slopes).  Used for
// tabulated CDFs and their inverses.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        d_.assign(n, 0.0);
        if (n < 2) return;
        std::vector<double> h(n - 1), s(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            s[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_[0] = s[0];
        d_[n - 1] = s[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (s[i - 1] * s[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
            }
        }
    }

    double operator()(double x) const {
        if (x_.empty()) return 0.0;
        if (x <= x_.front()) return y_.front();
        if (x >= x_.back()) return y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2 * t3 - 3 * t2 + 1) + h * d_[i] * (t3 - 2 * t2 + t) +
               y_[i + 1] * (-2 * t3 + 3 * t2) + h * d_[i + 1] * (t3 - t2);
    }

    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, d_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Radial sampling machinery
// ---------------------------------------------------------------------------

struct HeavyTailEquilibrium::RadialSampler {
    double split = 1.0;        // boundary between tabulated/analytic pieces
    double below_prob = 0.0;   // P(r <= split)
    double tail_exponent = 1.0;

    bool uniform_core = false;     // conditional core CDF is (r/split)^N
    bool arctan_exact = false;     // N=1, alpha=1 smooth profile: r = tan(pi u / 2)
    MonotoneCubic core_inverse;    // conditional u -> r on [0, split]
    MonotoneCubic core_cdf;        // r -> conditional CDF on [0, split]

    bool tail_rejection = false;   // non-constant ell: Potter envelope rejection
    double env_delta = 0.0;
    double env_const = 1.0;        // sup of ell(r) r^{-delta} over the tail
};

double HeavyTailEquilibrium::core_radial(double r) const {
    switch (core_) {
        case CoreKind::Uniform:
            return core_level_;
        case CoreKind::Maxwellian:
            return core_level_ * std::exp(-0.5 * r * r);
        case CoreKind::Smooth:
            return kappa0_ * std::pow(1.0 + r * r, -0.5 * (dim_ + alpha_)) * ell_(r);
    }
    return 0.0;
}

double HeavyTailEquilibrium::tail_radial(double r) const {
    if (core_ == CoreKind::Smooth)
        return kappa0_ * std::pow(1.0 + r * r, -0.5 * (dim_ + alpha_)) * ell_(r);
    return kappa0_ * std::pow(r, -(dim_ + alpha_)) * ell_(r);
}

double HeavyTailEquilibrium::eval_raw_radial(double r) const {
    return (r <= r_cut_ || core_ == CoreKind::Smooth) ? core_radial(r) : tail_radial(r);
}

double HeavyTailEquilibrium::eval_radial(double r) const {
    if (!std::isfinite(r) || r < 0.0) throw InvalidInput("eval: non-finite radius");
    return eval_raw_radial(r) / norm_;
}

double HeavyTailEquilibrium::eval(const Vec& v) const {
    if (!v.finite()) throw InvalidInput("eval: non-finite velocity");
    if (v.dim != dim_) throw InvalidInput("eval: dimension mismatch");
    return eval_radial(v.norm());
}

double HeavyTailEquilibrium::f0_radial(double r) const { return eval_radial(r) / ell_(r); }

HeavyTailEquilibrium::HeavyTailEquilibrium(int dim, double alpha, double kappa0, SlowlyVarying ell,
                                           CoreKind core, double r_cut, bool tail_exact)
    : dim_(dim), alpha_(alpha), kappa0_(kappa0), ell_(std::move(ell)), core_(core), r_cut_(r_cut),
      tail_exact_(tail_exact) {
    if (dim < 1 || dim > 3) throw InvalidInput("equilibrium: dim must be 1, 2 or 3");
    if (!(alpha > 0.0)) throw InvalidInput("equilibrium: alpha must be positive");
    if (!(kappa0 > 0.0)) throw InvalidInput("equilibrium: kappa0 must be positive");
    if (!(r_cut > 0.0)) throw InvalidInput("equilibrium: r_cut must be positive");
    if (core_ == CoreKind::Smooth && tail_exact_)
        throw InvalidInput("equilibrium: the smooth profile has no exact power tail");
    if (core_ != CoreKind::Smooth && !tail_exact_)
        throw InvalidInput("equilibrium: glued cores use the exact power tail");

    const double sig = sphere_area(dim_);
    if (core_ == CoreKind::Smooth) {
        auto f = [&](double r) { return std::pow(r, dim_ - 1) * core_radial(r); };
        norm_ = sig * (integrate(f, 0.0, 1.0, 1e-12).value +
                       integrate_to_infinity(f, 1.0, 1e-12).value);
    } else {
        core_level_ = kappa0_ * std::pow(r_cut_, -(dim_ + alpha_)) * ell_(r_cut_);
        if (core_ == CoreKind::Maxwellian) core_level_ *= std::exp(0.5 * r_cut_ * r_cut_);
        if (core_ == CoreKind::Uniform) {
            core_mass_raw_ = sig * core_level_ * std::pow(r_cut_, dim_) / dim_;
        } else {
            auto f = [&](double r) { return std::pow(r, dim_ - 1) * core_radial(r); };
            core_mass_raw_ = sig * integrate(f, 0.0, r_cut_, 1e-13).value;
        }
        double tail_mass;
        if (ell_.kind() == SlowlyVaryingKind::Constant) {
            tail_mass = sig * kappa0_ * ell_(r_cut_) * std::pow(r_cut_, -alpha_) / alpha_;
        } else {
            auto f = [&](double r) { return std::pow(r, dim_ - 1) * tail_radial(r); };
            tail_mass = sig * integrate_to_infinity(f, r_cut_, 1e-12).value;
        }
        norm_ = core_mass_raw_ + tail_mass;
    }
    if (!std::isfinite(norm_) || norm_ <= 0.0)
        throw NumericalFailure("equilibrium: normalization failed");
    build_sampler();
}

HeavyTailEquilibrium HeavyTailEquilibrium::uniform_core(int dim, double alpha, double kappa0,
                                                        double r_cut, SlowlyVarying ell) {
    return HeavyTailEquilibrium(dim, alpha, kappa0, std::move(ell), CoreKind::Uniform, r_cut, true);
}

HeavyTailEquilibrium HeavyTailEquilibrium::maxwellian_core(int dim, double alpha, double kappa0,
                                                           double r_cut, SlowlyVarying ell) {
    return HeavyTailEquilibrium(dim, alpha, kappa0, std::move(ell), CoreKind::Maxwellian, r_cut,
                                true);
}

HeavyTailEquilibrium HeavyTailEquilibrium::smooth_profile(int dim, double alpha, double kappa0,
                                                          SlowlyVarying ell) {
    return HeavyTailEquilibrium(dim, alpha, kappa0, std::move(ell), CoreKind::Smooth, 1.0, false);
}

HeavyTailEquilibrium HeavyTailEquilibrium::gaussian_bulk(int dim, double alpha, double r_cut) {
    // kappa0 chosen so the glued Maxwellian core is exactly the standard
    // normal density.
    const double kappa0 = std::pow(2.0 * M_PI, -0.5 * dim) * std::exp(-0.5 * r_cut * r_cut) *
                          std::pow(r_cut, dim + alpha);
    return maxwellian_core(dim, alpha, kappa0, r_cut);
}

// ---------------------------------------------------------------------------
// Moments
// ---------------------------------------------------------------------------

MomentValue HeavyTailEquilibrium::moment(double a) const {
    if (a < 0.0 || !std::isfinite(a)) throw InvalidInput("moment: order must be >= 0");
    // Finiteness of the tail term: integral r^{a - 1 - alpha} ell(r) dr.
    bool finite;
    if (a < alpha_) {
        finite = true;
    } else if (a > alpha_) {
        finite = false;
    } else {
        // borderline a == alpha: decided by ell
        finite = ell_.kind() == SlowlyVaryingKind::PowerOfLog && ell_.param() < -1.0;
    }
    if (!finite) return {false, 0.0};

    const double sig = sphere_area(dim_);
    double total;
    if (core_ == CoreKind::Smooth) {
        auto f = [&](double r) { return std::pow(r, a + dim_ - 1) * core_radial(r); };
        total = sig * (integrate(f, 0.0, 1.0, 1e-12).value +
                       integrate_to_infinity(f, 1.0, 1e-12).value);
    } else {
        auto fc = [&](double r) { return std::pow(r, a + dim_ - 1) * core_radial(r); };
        total = sig * integrate(fc, 0.0, r_cut_, 1e-13).value;
        if (ell_.kind() == SlowlyVaryingKind::Constant) {
            total += sig * kappa0_ * ell_(r_cut_) * std::pow(r_cut_, a - alpha_) / (alpha_ - a);
        } else {
            auto ft = [&](double r) { return std::pow(r, a + dim_ - 1) * tail_radial(r); };
            total += sig * integrate_to_infinity(ft, r_cut_, 1e-12).value;
        }
    }
    return {true, total / norm_};
}

// ---------------------------------------------------------------------------
// Radial CDF and sampling
// ---------------------------------------------------------------------------

void HeavyTailEquilibrium::build_sampler() {
    auto s = std::make_shared<RadialSampler>();
    const double sig = sphere_area(dim_);
    const bool const_ell = ell_.kind() == SlowlyVaryingKind::Constant;

    if (core_ == CoreKind::Smooth) {
        s->tail_exponent = alpha_;
        if (dim_ == 1 && alpha_ == 1.0 && const_ell) {
            // radial density (2/pi)/(1+r^2): exact arctan inversion
            s->arctan_exact = true;
            s->split = std::numeric_limits<double>::infinity();
            s->below_prob = 1.0;
            sampler_ = std::move(s);
            return;
        }
        // tabulate the CDF up to a large radius; beyond it the conditional
        // tail is power-law to high relative accuracy
        const double rtab = 1e3;
        s->split = rtab;
        std::vector<double> knots;
        for (int i = 0; i <= 1024; ++i) knots.push_back(8.0 * i / 1024.0);
        double g = 8.0;
        while (g < rtab) {
            g = std::min(g * std::pow(2.0, 1.0 / 64.0), rtab);
            knots.push_back(g);
        }
        std::vector<double> cdf(knots.size(), 0.0);
        auto f = [&](double r) { return sig * std::pow(r, dim_ - 1) * core_radial(r) / norm_; };
        for (std::size_t i = 1; i < knots.size(); ++i)
            cdf[i] = cdf[i - 1] + gl_integrate(f, knots[i - 1], knots[i], 24);
        s->below_prob = cdf.back();
        std::vector<double> u(cdf), r(knots);
        s->core_cdf = MonotoneCubic(knots, cdf);
        // conditional inverse (strictly increasing since density > 0)
        for (auto& x : u) x /= s->below_prob;
        s->core_inverse = MonotoneCubic(u, r);
        // the smooth tail is never an exact power law, so always thin the
        // power-law proposal against the true profile
        s->tail_rejection = true;
        if (const_ell) {
            s->env_delta = 0.0;
            s->env_const = ell_(rtab);
        } else {
            s->env_delta = std::min(ell_.potter_delta(), 0.5 * alpha_);
            double c = 0.0;
            for (double q = rtab; q <= 1e18; q *= 2.0)
                c = std::max(c, ell_(q) * std::pow(q / rtab, -s->env_delta));
            s->env_const = c * 1.05;
        }
        sampler_ = std::move(s);
        return;
    }

    s->split = r_cut_;
    s->below_prob = core_mass_raw_ / norm_;
    s->tail_exponent = alpha_;
    if (core_ == CoreKind::Uniform) {
        s->uniform_core = true;
    } else {
        std::vector<double> knots, cdf;
        const int nk = 2048;
        knots.reserve(nk + 1);
        cdf.assign(nk + 1, 0.0);
        for (int i = 0; i <= nk; ++i) knots.push_back(r_cut_ * i / nk);
        auto f = [&](double r) { return sig * std::pow(r, dim_ - 1) * core_radial(r); };
        for (int i = 1; i <= nk; ++i)
            cdf[static_cast<size_t>(i)] = cdf[static_cast<size_t>(i - 1)] +
                                          gl_integrate(f, knots[static_cast<size_t>(i - 1)],
                                                       knots[static_cast<size_t>(i)], 16);
        const double total = cdf.back();
        for (auto& x : cdf) x /= total;
        s->core_cdf = MonotoneCubic(knots, cdf);
        s->core_inverse = MonotoneCubic(cdf, knots);
    }
    if (!const_ell) {
        s->tail_rejection = true;
        s->env_delta = std::min(ell_.potter_delta(), 0.5 * alpha_);
        double c = 0.0;
        for (double q = r_cut_; q <= 1e18; q *= 2.0)
            c = std::max(c, ell_(q) * std::pow(q / r_cut_, -s->env_delta));
        s->env_const = c * 1.05;
    }
    sampler_ = std::move(s);
}

double HeavyTailEquilibrium::radial_cdf(double r) const {
    if (!(r >= 0.0)) throw InvalidInput("radial_cdf: negative radius");
    const RadialSampler& s = *sampler_;
    if (s.arctan_exact) return 2.0 / M_PI * std::atan(r);
    const double sig = sphere_area(dim_);
    if (r <= s.split) {
        if (s.uniform_core)
            return s.below_prob * std::pow(r / r_cut_, dim_);
        if (core_ == CoreKind::Smooth) return s.core_cdf(r);
        return s.below_prob * s.core_cdf(r);
    }
    if (ell_.kind() == SlowlyVaryingKind::Constant && core_ != CoreKind::Smooth) {
        const double tail_beyond = sig * kappa0_ * ell_(r_cut_) * std::pow(r, -alpha_) /
                                   (alpha_ * norm_);
        return 1.0 - tail_beyond;
    }
    auto f = [&](double q) { return sig * std::pow(q, dim_ - 1) * tail_radial(q) / norm_; };
    return 1.0 - integrate_to_infinity(f, r, 1e-10).value;
}

Vec HeavyTailEquilibrium::sample_one(uint64_t seed, uint64_t stream) const {
    RandomStream rng(seed, stream);
    return sample_with(rng);
}

Vec HeavyTailEquilibrium::sample_with(RandomStream& rng) const {
    const RadialSampler& s = *sampler_;

    double r;
    if (s.arctan_exact) {
        r = std::tan(0.5 * M_PI * rng.uniform());
    } else {
        const double u = rng.uniform_open();
        if (u < s.below_prob) {
            const double uc = u / s.below_prob;
            r = s.uniform_core ? r_cut_ * std::pow(uc, 1.0 / dim_) : s.core_inverse(uc);
        } else if (!s.tail_rejection) {
            // conditional tail CDF: 1 - (r/split)^{-alpha}
            const double ut = (1.0 - u) / (1.0 - s.below_prob);
            r = s.split * std::pow(ut, -1.0 / s.tail_exponent);
        } else {
            // Potter envelope rejection: propose from r^{-1-(alpha-delta)},
            // accept with ell(r) (r/split)^{-delta} / env_const
            const double ae = alpha_ - s.env_delta;
            for (int tries = 0;; ++tries) {
                if (tries > 10000)
                    throw NumericalFailure("equilibrium sampling: tail rejection stalled");
                const double up = rng.uniform_open();
                const double rp = s.split * std::pow(up, -1.0 / ae);
                double acc = ell_(rp) * std::pow(rp / s.split, -s.env_delta) / s.env_const;
                if (core_ == CoreKind::Smooth)  // exact algebraic profile, not the pure power law
                    acc *= std::pow(1.0 + 1.0 / (rp * rp), -0.5 * (dim_ + alpha_));
                if (rng.uniform() < acc) {
                    r = rp;
                    break;
                }
            }
        }
    }

    // isotropic direction
    Vec v;
    v.dim = dim_;
    if (dim_ == 1) {
        v[0] = (rng.uniform() < 0.5 ? -r : r);
    } else if (dim_ == 2) {
        const double th = 2.0 * M_PI * rng.uniform();
        v[0] = r * std::cos(th);
        v[1] = r * std::sin(th);
    } else {
        const double c = 2.0 * rng.uniform() - 1.0;
        const double ph = 2.0 * M_PI * rng.uniform();
        const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
        v[0] = r * sn * std::cos(ph);
        v[1] = r * sn * std::sin(ph);
        v[2] = r * c;
    }
    return v;
}

std::vector<Vec> HeavyTailEquilibrium::sample(uint64_t seed, std::size_t n) const {
    if (n < 1) throw InvalidInput("sample: n must be >= 1");
    std::vector<Vec> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = sample_one(seed, i); });
    return out;
}

}  // namespace fdl
