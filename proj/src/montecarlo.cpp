#include "fdl/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdl/quadrature.hpp"
#include "fdl/rng.hpp"

namespace fdl {

double ParticleEnsemble::radius(std::size_t i) const {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) s += position(i, d) * position(i, d);
    return std::sqrt(s);
}
double ParticleEnsemble::displacement(std::size_t i) const { return radius(i); }

namespace {

double vec_bracket_pow(const Vec& v, double beta) { return std::pow(bracket(v), beta); }

// Post-jump velocity sampler for q(v -> v') proportional to b(v, v') F(v').
// bgk draws F directly; the tilted part <v'>^beta F(v') is drawn by thinning
// a heavier-tailed reference equilibrium; mixed kinds use the envelope
// b <= <v>^beta + <v'>^beta valid for beta in (0,1].
class JumpSampler {
public:
    JumpSampler(const CollisionKernel& kernel) : kernel_(kernel), eq_(kernel.equilibrium_ptr()) {
        const double beta = kernel_.beta();
        const double alpha = eq_->alpha();
        switch (kernel_.kind()) {
            case KernelKind::Bgk:
                break;
            case KernelKind::Separable:
            case KernelKind::Shifted:
            case KernelKind::Physical: {
                if (kernel_.kind() == KernelKind::Physical && beta < 0.0)
                    throw UnsamplableKernel(
                        "physical kernel with beta < 0: the jump law is singular at v' = v and "
                        "has no tractable envelope");
                if (beta > 0.0) {
                    if (!(beta < alpha))
                        throw UnsamplableKernel("jump law needs beta < alpha");
                    build_tilted_reference(beta);
                    // tilted mass m_beta = integral <v>^beta F
                    m_beta_ = kernel_.nu0();
                    if (kernel_.kind() != KernelKind::Separable) {
                        // nu0 is not m_beta for distance kernels; integrate directly
                        m_beta_ = moment_bracket(beta);
                    }
                }
                break;
            }
        }
    }

    Vec draw(const Vec& v, RandomStream& rng) const {
        const double beta = kernel_.beta();
        switch (kernel_.kind()) {
            case KernelKind::Bgk:
                return eq_->sample_with(rng);
            case KernelKind::Separable: {
                if (beta <= 0.0) {
                    // envelope F, accept <v'>^beta <= 1
                    for (int it = 0; it < kMaxTries; ++it) {
                        Vec vp = eq_->sample_with(rng);
                        if (rng.uniform() < vec_bracket_pow(vp, beta)) return vp;
                    }
                    throw UnsamplableKernel("separable jump law: acceptance stalled");
                }
                return draw_tilted(rng);
            }
            case KernelKind::Shifted:
            case KernelKind::Physical: {
                if (beta == 0.0) return eq_->sample_with(rng);
                if (beta < 0.0) {
                    // shifted only: b = <v-v'>^beta <= 1
                    for (int it = 0; it < kMaxTries; ++it) {
                        Vec vp = eq_->sample_with(rng);
                        if (rng.uniform() < std::pow(bracket(v - vp), beta)) return vp;
                    }
                    throw UnsamplableKernel("shifted jump law: acceptance stalled");
                }
                // beta in (0,1): mixture envelope (<v>^beta + <v'>^beta) F(v')
                const double pv = vec_bracket_pow(v, beta);
                for (int it = 0; it < kMaxTries; ++it) {
                    const bool from_plain = rng.uniform() < pv / (pv + m_beta_);
                    Vec vp = from_plain ? eq_->sample_with(rng) : draw_tilted(rng);
                    const double bb = kernel_.kind() == KernelKind::Physical
                                          ? std::pow((v - vp).norm(), beta)
                                          : std::pow(bracket(v - vp), beta);
                    const double acc = bb / (pv + vec_bracket_pow(vp, beta));
                    if (rng.uniform() < acc) return vp;
                }
                throw UnsamplableKernel("distance-kernel jump law: acceptance stalled");
            }
        }
        return eq_->sample_with(rng);
    }

private:
    static constexpr int kMaxTries = 100000;

    void build_tilted_reference(double beta) {
        const auto& eq = *eq_;
        const double a2 = eq.alpha() - beta;
        switch (eq.core_kind()) {
            case CoreKind::Uniform:
                tilted_ref_ = std::make_shared<HeavyTailEquilibrium>(
                    HeavyTailEquilibrium::uniform_core(eq.dim(), a2, 1.0, eq.r_cut(), eq.ell()));
                break;
            case CoreKind::Maxwellian:
                tilted_ref_ = std::make_shared<HeavyTailEquilibrium>(
                    HeavyTailEquilibrium::maxwellian_core(eq.dim(), a2, eq.tail_constant_raw(),
                                                          eq.r_cut(), eq.ell()));
                break;
            case CoreKind::Smooth:
                tilted_ref_ = std::make_shared<HeavyTailEquilibrium>(
                    HeavyTailEquilibrium::smooth_profile(eq.dim(), a2, 1.0, eq.ell()));
                break;
        }
        // envelope constant sup of target/reference over radius
        double c = 0.0;
        for (double r = 0.0; r <= 32.0; r += 1.0 / 64.0) c = std::max(c, tilt_ratio(r, beta));
        for (double r = 32.0; r <= 1e9; r *= 1.25) c = std::max(c, tilt_ratio(r, beta));
        tilt_envelope_ = c * 1.02;
    }

    double tilt_ratio(double r, double beta) const {
        const double target = std::pow(bracket(r), beta) * eq_->eval_radial(r);
        return target / tilted_ref_->eval_radial(r);
    }

    Vec draw_tilted(RandomStream& rng) const {
        const double beta = kernel_.beta();
        for (int it = 0; it < kMaxTries; ++it) {
            Vec vp = tilted_ref_->sample_with(rng);
            const double acc = tilt_ratio(vp.norm(), beta) / tilt_envelope_;
            if (rng.uniform() < acc) return vp;
        }
        throw UnsamplableKernel("tilted jump law: acceptance stalled");
    }

    double moment_bracket(double beta) const {
        // integral <v>^beta F via the equilibrium moment machinery is not
        // exact (bracket vs plain power); integrate radially instead
        const int n = eq_->dim();
        const double sig = sphere_area(n);
        auto f = [&](double r) {
            return std::pow(bracket(r), beta) * eq_->eval_radial(r) * std::pow(r, n - 1);
        };
        const double rc = std::max(1.0, eq_->r_cut());
        return sig * (integrate(f, 0.0, rc, 1e-11).value +
                      integrate_to_infinity(f, rc, 1e-11).value);
    }

    const CollisionKernel& kernel_;
    std::shared_ptr<const HeavyTailEquilibrium> eq_;
    std::shared_ptr<const HeavyTailEquilibrium> tilted_ref_;
    double tilt_envelope_ = 1.0;
    double m_beta_ = 1.0;
};

}  // namespace

SimulationResult simulate(const JumpProcessParams& params) {
    if (!params.kernel) throw InvalidInput("simulate: kernel required");
    if (params.n_particles < 1) throw InvalidInput("simulate: need at least one particle");
    const CollisionKernel& kernel = *params.kernel;
    const HeavyTailEquilibrium& eq = kernel.equilibrium();
    const int dim = eq.dim();
    const double eps = params.eps;
    const double theta = params.regime.theta(eps);
    const double speed = eps / theta;

    std::vector<double> snaps = params.snapshot_times;
    if (snaps.empty() || snaps.back() < params.horizon) snaps.push_back(params.horizon);
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (snaps[i] <= 0.0 || (i > 0 && snaps[i] <= snaps[i - 1]))
            throw InvalidInput("simulate: snapshot times must be positive and increasing");
        if (snaps[i] > params.horizon + 1e-12)
            throw InvalidInput("simulate: snapshot beyond horizon");
    }

    const JumpSampler jumps(kernel);
    const bool state_dependent_rate = kernel.kind() != KernelKind::Bgk;
    // pre-build the radial nu cache before entering the parallel region
    if (state_dependent_rate) kernel.nu_radial_cached(1.0);

    const std::size_t n = params.n_particles;
    SimulationResult res;
    res.snapshots.resize(snaps.size());
    for (std::size_t s = 0; s < snaps.size(); ++s) {
        auto& e = res.snapshots[s];
        e.dim = dim;
        e.time = snaps[s];
        e.n = n;
        e.positions.assign(n * static_cast<std::size_t>(dim), 0.0);
        e.velocities.assign(n * static_cast<std::size_t>(dim), 0.0);
    }

    parallel_for(n, [&](std::size_t i) {
        RandomStream rng(params.seed, i);
        Vec x;
        x.dim = dim;
        if (params.initial_gaussian_sigma) {
            // Box-Muller per coordinate
            for (int d = 0; d < dim; ++d) {
                const double u1 = rng.uniform_open(), u2 = rng.uniform();
                x[d] = params.origin_x +
                       *params.initial_gaussian_sigma *
                           std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            }
        } else {
            for (int d = 0; d < dim; ++d) x[d] = params.origin_x * (d == 0 ? 1.0 : 0.0);
        }
        Vec v = eq.sample_with(rng);
        double t = 0.0;
        for (std::size_t s = 0; s < snaps.size(); ++s) {
            const double ts = snaps[s];
            while (t < ts) {
                double dt_jump;
                if (params.disable_jumps) {
                    dt_jump = std::numeric_limits<double>::infinity();
                } else {
                    const double rate =
                        (state_dependent_rate ? kernel.nu_radial_cached(v.norm()) : 1.0) / theta;
                    dt_jump = -std::log(rng.uniform_open()) / rate;
                }
                if (t + dt_jump >= ts) {
                    for (int d = 0; d < dim; ++d) x[d] += speed * v[d] * (ts - t);
                    t = ts;
                    // note: the exponential clock is memoryless, so the
                    // residual clock can be discarded at snapshots
                } else {
                    for (int d = 0; d < dim; ++d) x[d] += speed * v[d] * dt_jump;
                    t += dt_jump;
                    v = jumps.draw(v, rng);
                }
            }
            auto& e = res.snapshots[s];
            for (int d = 0; d < dim; ++d) {
                e.positions[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] = x[d];
                e.velocities[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)] = v[d];
            }
        }
    });
    return res;
}

std::vector<CfValue> empirical_cf(const ParticleEnsemble& ensemble,
                                  const std::vector<Vec>& k_list) {
    const std::size_t n = ensemble.n;
    if (n == 0) throw InvalidInput("empirical_cf: empty ensemble");
    const std::size_t n_blocks = std::min<std::size_t>(200, n);
    std::vector<CfValue> out(k_list.size());

    parallel_for(k_list.size(), [&](std::size_t ik) {
        const Vec& k = k_list[ik];
        // blockwise partial sums in fixed order
        std::vector<std::complex<double>> block_sum(n_blocks, {0.0, 0.0});
        std::vector<std::size_t> block_cnt(n_blocks, 0);
        for (std::size_t i = 0; i < n; ++i) {
            double kx = 0.0;
            for (int d = 0; d < ensemble.dim; ++d) kx += k[d] * ensemble.position(i, d);
            block_sum[i % n_blocks] += std::exp(std::complex<double>(0.0, -kx));
            ++block_cnt[i % n_blocks];
        }
        std::complex<double> total{0.0, 0.0};
        for (const auto& b : block_sum) total += b;
        const std::complex<double> cf = total / static_cast<double>(n);

        // jackknife over blocks on |cf|
        std::vector<double> loo(n_blocks);
        double mean_loo = 0.0;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            const std::complex<double> cf_b =
                (total - block_sum[b]) / static_cast<double>(n - block_cnt[b]);
            loo[b] = std::abs(cf_b);
            mean_loo += loo[b];
        }
        mean_loo /= static_cast<double>(n_blocks);
        double ss = 0.0;
        for (double v : loo) ss += (v - mean_loo) * (v - mean_loo);
        out[ik].k = k;
        out[ik].cf = cf;
        out[ik].se_abs = std::sqrt(ss * (static_cast<double>(n_blocks) - 1.0) /
                                   static_cast<double>(n_blocks));
    });
    return out;
}

DisplacementReport displacement_scaling(const std::vector<ParticleEnsemble>& snapshots, double q) {
    if (snapshots.size() < 4)
        throw InvalidInput("displacement_scaling: need at least 4 snapshot times");
    if (!(q > 0.0 && q < 1.0)) throw InvalidInput("displacement_scaling: q in (0,1)");
    for (std::size_t i = 2; i < snapshots.size(); ++i) {
        const double r1 = snapshots[i - 1].time / snapshots[i - 2].time;
        const double r2 = snapshots[i].time / snapshots[i - 1].time;
        if (std::abs(std::log(r2 / r1)) > 1e-9)
            throw InvalidInput("displacement_scaling: snapshot times must be geometric");
    }

    DisplacementReport rep;
    for (const auto& e : snapshots) {
        std::vector<double> r(e.n);
        for (std::size_t i = 0; i < e.n; ++i) r[i] = e.radius(i);
        const std::size_t iq = static_cast<std::size_t>(q * (e.n - 1));
        std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(iq), r.end());
        const double xq = r[iq];

        // asymptotic SE of the quantile via a finite-difference density
        const std::size_t h = std::max<std::size_t>(1, e.n / 100);
        const std::size_t ilo = (iq > h) ? iq - h : 0;
        const std::size_t ihi = std::min(e.n - 1, iq + h);
        std::vector<double> r2(r);
        std::nth_element(r2.begin(), r2.begin() + static_cast<std::ptrdiff_t>(ilo), r2.end());
        const double xlo = r2[ilo];
        std::nth_element(r2.begin(), r2.begin() + static_cast<std::ptrdiff_t>(ihi), r2.end());
        const double xhi = r2[ihi];
        const double dens = (static_cast<double>(ihi - ilo) / static_cast<double>(e.n)) /
                            std::max(xhi - xlo, 1e-300);
        const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(e.n)) / dens;
        if (se > 0.1 * xq)
            throw StatisticsError("displacement_scaling: quantile too noisy (relative SE > 10%)");
        rep.times.push_back(e.time);
        rep.quantiles.push_back(xq);
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.times.size());
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
        const double x = std::log(rep.times[i]), y = std::log(rep.quantiles[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

}  // namespace fdl
