#include "fdl/collision.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fdl/quadrature.hpp"

namespace fdl {

namespace {

const char* kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::Bgk:
            return "bgk";
        case KernelKind::Separable:
            return "separable";
        case KernelKind::Shifted:
            return "shifted";
        case KernelKind::Physical:
            return "physical";
    }
    return "?";
}

}  // namespace

CollisionKernel::CollisionKernel(KernelKind kind, std::shared_ptr<const HeavyTailEquilibrium> eq,
                                 double beta, std::shared_ptr<const VelocityGrid> grid, Options opt)
    : kind_(kind), eq_(std::move(eq)), beta_(beta), grid_(std::move(grid)), opt_(opt) {
    if (!eq_) throw InvalidInput("collision kernel: equilibrium required");
    if (grid_ && grid_->dim() != eq_->dim())
        throw InvalidInput("collision kernel: grid/equilibrium dimension mismatch");
    const double alpha = eq_->alpha();
    const int n = eq_->dim();
    if (kind_ == KernelKind::Bgk && beta_ != 0.0)
        throw InvalidInput("bgk kernel has beta = 0 by definition");
    if ((kind_ == KernelKind::Shifted || kind_ == KernelKind::Physical) && n != 1)
        throw InvalidInput("shifted/physical kernels are implemented for dim = 1");
    if (!opt_.unchecked) {
        switch (kind_) {
            case KernelKind::Bgk:
                break;
            case KernelKind::Separable:
            case KernelKind::Shifted:
                if (!(std::abs(beta_) < alpha))
                    throw InvalidInput(std::string(kind_name(kind_)) +
                                       " kernel requires |beta| < alpha");
                break;
            case KernelKind::Physical: {
                const double lo = -std::min(alpha, 0.5 * n), hi = std::min(alpha, 1.0 * n);
                if (!(beta_ > lo && beta_ < hi))
                    throw InvalidInput(
                        "physical kernel requires beta in (-min(alpha,N/2), min(alpha,N)); "
                        "construct with unchecked=true to probe divergence");
                break;
            }
        }
    }
    if (opt_.m_b3) m_b3_ = opt_.m_b3;
}

CollisionKernel CollisionKernel::bgk(std::shared_ptr<const HeavyTailEquilibrium> eq,
                                     std::shared_ptr<const VelocityGrid> grid) {
    return CollisionKernel(KernelKind::Bgk, std::move(eq), 0.0, std::move(grid));
}
CollisionKernel CollisionKernel::separable(std::shared_ptr<const HeavyTailEquilibrium> eq,
                                           double beta, std::shared_ptr<const VelocityGrid> grid,
                                           Options opt) {
    return CollisionKernel(KernelKind::Separable, std::move(eq), beta, std::move(grid), opt);
}
CollisionKernel CollisionKernel::shifted(std::shared_ptr<const HeavyTailEquilibrium> eq,
                                         double beta, std::shared_ptr<const VelocityGrid> grid,
                                         Options opt) {
    return CollisionKernel(KernelKind::Shifted, std::move(eq), beta, std::move(grid), opt);
}
CollisionKernel CollisionKernel::physical(std::shared_ptr<const HeavyTailEquilibrium> eq,
                                          double beta, std::shared_ptr<const VelocityGrid> grid,
                                          Options opt) {
    return CollisionKernel(KernelKind::Physical, std::move(eq), beta, std::move(grid), opt);
}

const VelocityGrid& CollisionKernel::grid() const {
    require_grid();
    return *grid_;
}

void CollisionKernel::require_grid() const {
    if (!grid_) throw PreconditionError("this operation needs a velocity grid");
}

double CollisionKernel::b(const Vec& v, const Vec& vp) const {
    switch (kind_) {
        case KernelKind::Bgk:
            return 1.0;
        case KernelKind::Separable:
            return std::pow(bracket(v), beta_) * std::pow(bracket(vp), beta_);
        case KernelKind::Shifted:
            return std::pow(bracket(v - vp), beta_);
        case KernelKind::Physical:
            return std::pow((v - vp).norm(), beta_);
    }
    return 0.0;
}

double CollisionKernel::sigma(const Vec& v, const Vec& vp) const { return b(v, vp) * eq_->eval(v); }

// ---------------------------------------------------------------------------
// Line integrals over R (1-D kernels with a distance factor)
// ---------------------------------------------------------------------------

double CollisionKernel::line_integral(const std::function<double(double)>& smooth,
                                      double power_of_dist, double center, double rel_tol) const {
    const double rc = eq_->r_cut();
    const double r0 = std::max({16.0, 4.0 * rc, 2.0 * std::abs(center) + 2.0});
    std::set<double> pts{-r0, r0, -rc, rc, 0.0};
    for (double d : {center - 1.0, center, center + 1.0})
        if (d > -r0 && d < r0) pts.insert(d);
    const bool physical = kind_ == KernelKind::Physical;

    auto full = [&](double u) {
        const double dist = physical ? std::abs(u - center) : bracket(u - center);
        return smooth(u) * std::pow(dist, power_of_dist);
    };

    double total = 0.0;
    double prev = -r0;
    for (double p : pts) {
        if (p <= prev) continue;
        const double a = prev, bb = p;
        prev = p;
        if (physical && power_of_dist < 0.0 && center >= a && center <= bb) {
            total += integrate_with_algebraic_singularity(smooth, a, bb, center, power_of_dist,
                                                          rel_tol)
                         .value;
        } else {
            total += integrate(full, a, bb, rel_tol).value;
        }
    }
    total += integrate_to_infinity(full, r0, rel_tol).value;
    auto left = [&](double u) { return full(-u); };
    total += integrate_to_infinity(left, r0, rel_tol).value;
    return total;
}

// ---------------------------------------------------------------------------
// Collision frequency
// ---------------------------------------------------------------------------

double CollisionKernel::nu_quadrature(double r) const {
    const double alpha = eq_->alpha();
    switch (kind_) {
        case KernelKind::Bgk:
            return 1.0;
        case KernelKind::Separable: {
            if (!m_beta_) {
                std::lock_guard<std::recursive_mutex> lock(*mutex_);
                const double sig = sphere_area(eq_->dim());
                auto f = [&](double s) {
                    return std::pow(bracket(s), beta_) * eq_->eval_radial(s) *
                           std::pow(s, eq_->dim() - 1);
                };
                if (!(beta_ < alpha))
                    throw NumericalFailure("nu: moment <v>^beta F diverges (beta >= alpha)");
                m_beta_ = sig * (integrate(f, 0.0, std::max(1.0, eq_->r_cut()), 1e-12).value +
                                 integrate_to_infinity(f, std::max(1.0, eq_->r_cut()), 1e-12).value);
            }
            return *m_beta_ * std::pow(bracket(r), beta_);
        }
        case KernelKind::Shifted:
        case KernelKind::Physical: {
            if (kind_ == KernelKind::Physical && (beta_ >= alpha || beta_ <= -1.0))
                throw NumericalFailure("nu: integral b F diverges for this beta");
            if (kind_ == KernelKind::Shifted && beta_ >= alpha)
                throw NumericalFailure("nu: integral b F diverges for this beta");
            auto F = [&](double u) { return eq_->eval_radial(std::abs(u)); };
            return line_integral(F, beta_, r, 1e-11);
        }
    }
    return 1.0;
}

double CollisionKernel::nu_radial(double r) const { return nu_quadrature(r); }

double CollisionKernel::nu(const Vec& v) const {
    if (!v.finite()) throw InvalidInput("nu: non-finite velocity");
    return nu_quadrature(v.norm());
}

double CollisionKernel::nu_radial_cached(double r) const {
    if (kind_ == KernelKind::Bgk) return 1.0;
    if (kind_ == KernelKind::Separable) return nu_quadrature(r);  // closed form, cheap
    if (!nu_cache_built_) {
        std::lock_guard<std::recursive_mutex> lock(*mutex_);
        if (nu_cache_built_) return nu_radial_cached(r);
        // dense radial table: uniform below max(2 r_cut, 4), geometric beyond
        const double rc = std::max(2.0 * eq_->r_cut(), 4.0);
        std::vector<double> rs;
        for (int i = 0; i <= 256; ++i) rs.push_back(rc * i / 256.0);
        double g = rc;
        while (g < 1e7) {
            g *= std::pow(2.0, 1.0 / 6.0);
            rs.push_back(g);
        }
        nu_cache_r_.clear();
        nu_cache_v_.clear();
        for (double r2 : rs) {
            nu_cache_r_.push_back(r2);
            nu_cache_v_.push_back(nu_quadrature(r2));
        }
        nu_cache_built_ = true;
    }
    if (r >= nu_cache_r_.back()) {
        // extrapolate with the measured asymptotic slope beta
        const std::size_t n = nu_cache_r_.size();
        const double slope = std::log(nu_cache_v_[n - 1] / nu_cache_v_[n - 9]) /
                             std::log(nu_cache_r_[n - 1] / nu_cache_r_[n - 9]);
        return nu_cache_v_[n - 1] * std::pow(r / nu_cache_r_[n - 1], slope);
    }
    const auto it = std::upper_bound(nu_cache_r_.begin(), nu_cache_r_.end(), r);
    const std::size_t i = std::max<std::size_t>(1, static_cast<std::size_t>(it - nu_cache_r_.begin())) - 1;
    const double r0 = nu_cache_r_[i], r1 = nu_cache_r_[i + 1];
    const double t = (r - r0) / (r1 - r0);
    // local cubic would be overkill; nu is smooth and slowly varying here
    return nu_cache_v_[i] * (1.0 - t) + nu_cache_v_[i + 1] * t;
}

double CollisionKernel::measure_nu0() const {
    // median of |v|^{-beta} nu(v) over a geometric radius sweep [1e2, 1e4]
    std::vector<double> vals;
    for (int i = 0; i <= 32; ++i) {
        const double r = 1e2 * std::pow(1e2, i / 32.0);
        vals.push_back(std::pow(r, -beta_) * nu_radial_cached(r));
    }
    std::nth_element(vals.begin(), vals.begin() + vals.size() / 2, vals.end());
    return vals[vals.size() / 2];
}

double CollisionKernel::nu0() const {
    if (opt_.nu0) return *opt_.nu0;
    if (kind_ == KernelKind::Bgk) return 1.0;
    std::lock_guard<std::recursive_mutex> lock(*mutex_);
    if (!nu0_measured_) nu0_measured_ = measure_nu0();
    return *nu0_measured_;
}

// ---------------------------------------------------------------------------
// Grid-backed operators
// ---------------------------------------------------------------------------

void CollisionKernel::build_grid_arrays() const {
    std::lock_guard<std::recursive_mutex> lock(*mutex_);
    if (grid_built_) return;
    require_grid();
    const auto& g = *grid_;
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    f_grid_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        f_grid_[i] = eq_->eval(g.nodes()[static_cast<size_t>(i)]);
    // exact discrete normalization: <F>_grid = 1 so L conserves mass exactly
    f_grid_ /= g.quadrature(f_grid_);

    switch (kind_) {
        case KernelKind::Bgk:
            nu_grid_disc_ = Eigen::ArrayXd::Ones(n);
            break;
        case KernelKind::Separable: {
            tilt_grid_.resize(n);
            for (Eigen::Index i = 0; i < n; ++i)
                tilt_grid_[i] = std::pow(bracket(g.nodes()[static_cast<size_t>(i)]), beta_);
            const double m = g.quadrature(tilt_grid_ * f_grid_);
            nu_grid_disc_ = tilt_grid_ * m;
            break;
        }
        case KernelKind::Shifted:
        case KernelKind::Physical: {
            build_dense_matrix();
            nu_grid_disc_.resize(n);
            const auto& w = g.weights();
            for (Eigen::Index i = 0; i < n; ++i)
                nu_grid_disc_[i] = (w * bmat_.row(i).transpose().array() * f_grid_).sum();
            break;
        }
    }
    grid_built_ = true;
}

void CollisionKernel::build_dense_matrix() const {
    std::lock_guard<std::recursive_mutex> lock(*mutex_);
    if (dense_built_) return;
    require_grid();
    const auto& g = *grid_;
    const Eigen::Index n = static_cast<Eigen::Index>(g.size());
    bmat_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Vec& vi = g.nodes()[static_cast<size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            bmat_(i, j) = b(vi, g.nodes()[static_cast<size_t>(j)]);
        }
        if (kind_ == KernelKind::Physical) {
            // |v - v'|^beta is singular/degenerate on the diagonal; use the
            // cell average of |u|^beta over a cell of the local weight width
            const double h = g.weights()[i];
            bmat_(i, i) = std::pow(0.5 * h, beta_) / (1.0 + beta_);
        }
    }
    dense_built_ = true;
}

const Eigen::ArrayXd& CollisionKernel::F_grid() const {
    build_grid_arrays();
    return f_grid_;
}

const Eigen::MatrixXd& CollisionKernel::dense_b() const {
    build_dense_matrix();
    return bmat_;
}

const Eigen::ArrayXd& CollisionKernel::nu_grid() const {
    build_grid_arrays();
    return nu_grid_disc_;
}

double CollisionKernel::balance_rescaling() const {
    std::lock_guard<std::recursive_mutex> lock(*mutex_);
    if (rescaling_) return *rescaling_;
    build_grid_arrays();
    double worst = 0.0;
    if (kind_ == KernelKind::Bgk) {
        worst = 0.0;  // nu is exactly 1 on both sides after renormalization
    } else if (kind_ == KernelKind::Separable) {
        const double m_grid = grid_->quadrature(tilt_grid_ * f_grid_);
        nu_quadrature(0.0);  // ensure m_beta_
        worst = std::abs(m_grid / *m_beta_ - 1.0);
    } else {
        for (std::size_t i = 0; i < grid_->size(); i += 7) {
            const double r = grid_->nodes()[i].norm();
            const double cont = nu_radial_cached(r);
            worst = std::max(worst,
                             std::abs(nu_grid_disc_[static_cast<Eigen::Index>(i)] / cont - 1.0));
        }
    }
    rescaling_ = worst;
    return worst;
}

Eigen::ArrayXd CollisionKernel::apply_K(const Eigen::ArrayXd& f) const {
    build_grid_arrays();
    const auto& g = *grid_;
    if (f.size() != static_cast<Eigen::Index>(g.size()))
        throw InvalidInput("apply_K: grid function has wrong length");
    switch (kind_) {
        case KernelKind::Bgk:
            return g.quadrature(f) * f_grid_;
        case KernelKind::Separable:
            return g.quadrature(tilt_grid_ * f) * (f_grid_ * tilt_grid_);
        default: {
            const Eigen::VectorXd wf = (g.weights() * f).matrix();
            return f_grid_ * (bmat_ * wf).array();
        }
    }
}

Eigen::ArrayXd CollisionKernel::apply_L(const Eigen::ArrayXd& f) const {
    return apply_K(f) - nu_grid() * f;
}

// ---------------------------------------------------------------------------
// Boundedness checks
// ---------------------------------------------------------------------------

B3Report CollisionKernel::b3_check(const std::vector<Vec>& probes, bool thm3_mode) const {
    const double alpha = eq_->alpha();
    const int n = eq_->dim();
    B3Report rep;

    // analytic divergence screens
    auto diverged = [&](const std::string& what) {
        rep.diverged = true;
        rep.pass = false;
        rep.detail = what;
        return rep;
    };
    if (kind_ == KernelKind::Separable || kind_ == KernelKind::Shifted) {
        if (beta_ >= alpha)
            return diverged("integral F' nu/b: moment of order beta >= alpha diverges");
        if (-beta_ >= alpha)
            return diverged("integral F' nu/b: moment of order -beta >= alpha diverges");
    }
    if (kind_ == KernelKind::Physical) {
        if (beta_ >= n)
            return diverged("integral F' nu/b: 1/b = |v-v'|^-beta is not locally integrable");
        if (beta_ <= -alpha)
            return diverged("integral F' nu/b: tail moment of order -beta diverges");
        if (2.0 * beta_ <= -n)
            return diverged("integral F'/nu' b^2/nu^2: b^2 is not locally integrable");
        if (beta_ >= alpha)
            return diverged("integral F'/nu' b^2/nu^2: tail of b^2 F'/nu' diverges");
    }
    if (thm3_mode) {
        // (|v'|^2 / nu') F' needs the moment of order 2 - beta
        if (!eq_->moment(2.0 - beta_).finite)
            return diverged("integral |v'|^2/nu' F': moment of order 2 - beta diverges");
    }

    const bool discrete = probes.empty() && grid_ != nullptr;
    std::vector<Vec> pr = probes;
    if (pr.empty() && !discrete) {
        for (int i = 0; i <= 40; ++i) {
            const double r = (i == 0) ? 0.0 : std::pow(10.0, -1.0 + 5.0 * (i - 1) / 39.0);
            pr.push_back(n == 1 ? Vec(r) : (n == 2 ? Vec(r, 0.0) : Vec(r, 0.0, 0.0)));
        }
    }

    std::vector<std::pair<double, double>> vals;  // (|v|, I1 + I2 [+ g2])
    if (discrete) {
        build_grid_arrays();
        const auto& g = *grid_;
        const Eigen::Index m = static_cast<Eigen::Index>(g.size());
        const auto& w = g.weights();
        Eigen::ArrayXd inv_t;
        double mneg = 0.0, sep_inner = 0.0;
        if (kind_ == KernelKind::Separable) {
            inv_t = tilt_grid_.inverse();
            mneg = g.quadrature(f_grid_ * inv_t);
            sep_inner = (w * f_grid_ * tilt_grid_.square() / nu_grid_disc_).sum();
        }
        const double m2nu = thm3_mode
                                ? g.quadrature(f_grid_ * grid_->sample_radial([](double r) {
                                                   return r * r;
                                               }) / nu_grid_disc_)
                                : 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            double i1, i2sq;
            switch (kind_) {
                case KernelKind::Bgk:
                    i1 = nu_grid_disc_[i];                         // = 1
                    i2sq = 1.0 / (nu_grid_disc_[i] * nu_grid_disc_[i]);  // = 1
                    break;
                case KernelKind::Separable:
                    i1 = nu_grid_disc_[i] * inv_t[i] * mneg;
                    i2sq = sep_inner * tilt_grid_[i] * tilt_grid_[i] /
                           (nu_grid_disc_[i] * nu_grid_disc_[i]);
                    break;
                default: {
                    build_dense_matrix();
                    const auto row = bmat_.row(i).transpose().array();
                    i1 = nu_grid_disc_[i] * (w * f_grid_ / row).sum();
                    i2sq = (w * f_grid_ * row * row / nu_grid_disc_).sum() /
                           (nu_grid_disc_[i] * nu_grid_disc_[i]);
                    break;
                }
            }
            double total = i1 + std::sqrt(i2sq);
            if (thm3_mode) total = i1 + m2nu;  // the classical-regime integrand
            vals.emplace_back(g.nodes()[static_cast<size_t>(i)].norm(), total);
        }
    } else {
        // continuum quadrature on explicit probes
        const double sig = sphere_area(n);
        double m2nu = 0.0;
        if (thm3_mode) {
            auto f = [&](double s) {
                return s * s / nu_radial_cached(s) * eq_->eval_radial(s) * std::pow(s, n - 1);
            };
            m2nu = sig * (integrate(f, 0.0, std::max(1.0, eq_->r_cut()), 1e-10).value +
                          integrate_to_infinity(f, std::max(1.0, eq_->r_cut()), 1e-10).value);
        }
        double sep_mneg = 0.0;
        if (kind_ == KernelKind::Separable) {
            nu_quadrature(0.0);  // ensure m_beta_
            auto f = [&](double s) {
                return std::pow(bracket(s), -beta_) * eq_->eval_radial(s) * std::pow(s, n - 1);
            };
            sep_mneg = sig * (integrate(f, 0.0, std::max(1.0, eq_->r_cut()), 1e-11).value +
                              integrate_to_infinity(f, std::max(1.0, eq_->r_cut()), 1e-11).value);
        }
        for (const Vec& v : pr) {
            const double r = v.norm();
            const double nv = nu_radial_cached(r);
            double i1, i2sq;
            switch (kind_) {
                case KernelKind::Bgk:
                    i1 = 1.0;
                    i2sq = 1.0;
                    break;
                case KernelKind::Separable: {
                    i1 = *m_beta_ * sep_mneg;
                    i2sq = 1.0 / (*m_beta_ * *m_beta_);
                    break;
                }
                default: {
                    auto F = [&](double u) { return eq_->eval_radial(std::abs(u)); };
                    const double l1 = line_integral(F, -beta_, r, 1e-10);
                    i1 = nv * l1;
                    auto Fon = [&](double u) {
                        return eq_->eval_radial(std::abs(u)) / nu_radial_cached(std::abs(u));
                    };
                    const double l2 = line_integral(Fon, 2.0 * beta_, r, 1e-10);
                    i2sq = l2 / (nv * nv);
                    break;
                }
            }
            double total = i1 + std::sqrt(i2sq);
            if (thm3_mode) total = i1 + m2nu;
            vals.emplace_back(r, total);
        }
    }

    double sup = 0.0;
    for (auto& [r, t] : vals) sup = std::max(sup, t);
    rep.m_observed = sup;

    // growth screen: the sup must not be carried by the largest probes only
    std::sort(vals.begin(), vals.end());
    const std::size_t q3 = vals.size() - std::max<std::size_t>(1, vals.size() / 4);
    double sup_low = 0.0, sup_high = 0.0;
    for (std::size_t i = 0; i < vals.size(); ++i) {
        double& slot = (i < q3) ? sup_low : sup_high;
        slot = std::max(slot, vals[i].second);
    }
    const bool growing = sup_high > 10.0 * std::max(sup_low, 1e-300);
    if (growing) {
        rep.pass = false;
        std::ostringstream os;
        os << "observed sup grows with probe radius (|v| ~ " << vals.back().first << ")";
        rep.detail = os.str();
        return rep;
    }
    rep.pass = true;
    if (!thm3_mode) m_b3_ = sup;
    return rep;
}

double CollisionKernel::m_b3() const {
    if (!m_b3_)
        throw PreconditionError("M of the boundedness assumption unavailable: run b3_check first");
    return *m_b3_;
}

CoercivityReport CollisionKernel::coercivity_check(const Eigen::ArrayXd& f) const {
    build_grid_arrays();
    const double m = m_b3();
    const auto& g = *grid_;
    if (f.size() != static_cast<Eigen::Index>(g.size()))
        throw InvalidInput("coercivity_check: grid function has wrong length");
    if (!f.isFinite().all()) throw InvalidInput("coercivity_check: f not in L2(F^-1)");

    const Eigen::ArrayXd lf = apply_L(f);
    CoercivityReport rep;
    rep.lhs = g.quadrature(lf * f / f_grid_);
    const Eigen::ArrayXd gg = f - g.quadrature(f) * f_grid_;
    const double norm_g = g.quadrature(gg * gg * nu_grid_disc_ / f_grid_);
    rep.rhs = -norm_g / (2.0 * m * (1.0 + 1e-6));
    rep.pass = rep.lhs <= rep.rhs + 1e-12 * std::max({1.0, std::abs(rep.lhs), std::abs(rep.rhs)});
    return rep;
}

// ---------------------------------------------------------------------------
// Cell problem
// ---------------------------------------------------------------------------

CellProblemSolution CollisionKernel::solve_cell_problem() const {
    build_grid_arrays();
    const double alpha = eq_->alpha();
    // finite integral |v|^2 nu^-1 F requires the 2 - beta moment
    if (!(2.0 - beta_ < alpha))
        throw PreconditionError(
            "cell problem: integral |v|^2 nu^-1 F diverges (needs beta > 2 - alpha)");
    const auto& g = *grid_;
    const Eigen::Index m = static_cast<Eigen::Index>(g.size());
    const int n = eq_->dim();

    CellProblemSolution sol;
    sol.chi.resize(static_cast<size_t>(n));
    sol.D = Eigen::MatrixXd::Zero(n, n);

    for (int d = 0; d < n; ++d) {
        Eigen::ArrayXd vd(m);
        for (Eigen::Index i = 0; i < m; ++i) vd[i] = g.nodes()[static_cast<size_t>(i)][d];
        Eigen::ArrayXd chi;
        switch (kind_) {
            case KernelKind::Bgk:
            case KernelKind::Separable:
                // K(v F / nu) vanishes by oddness, so chi = v F / nu solves the
                // problem and has zero mean on the symmetric grid
                chi = vd * f_grid_ / nu_grid_disc_;
                break;
            default: {
                build_dense_matrix();
                // bordered system fixing <chi> = 0
                Eigen::MatrixXd A(m + 1, m + 1);
                for (Eigen::Index i = 0; i < m; ++i) {
                    for (Eigen::Index j = 0; j < m; ++j)
                        A(i, j) = g.weights()[j] * bmat_(i, j) * f_grid_[i];
                    A(i, i) -= nu_grid_disc_[i];
                    A(i, m) = f_grid_[i];
                    A(m, i) = g.weights()[i];
                }
                A(m, m) = 0.0;
                Eigen::VectorXd rhs(m + 1);
                rhs.head(m) = (-vd * f_grid_).matrix();
                rhs[m] = 0.0;
                Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
                Eigen::VectorXd x = lu.solve(rhs);
                if (!x.allFinite())
                    throw NumericalFailure("cell problem: singular discrete operator");
                chi = x.head(m).array();
                break;
            }
        }
        // residual of L(chi) + vF
        const Eigen::ArrayXd res = apply_L(chi) + vd * f_grid_;
        double rmax = res.abs().maxCoeff();
        const double scale = (vd * f_grid_).abs().maxCoeff();
        if (rmax > 1e-6 * std::max(scale, 1e-300))
            throw NumericalFailure("cell problem: residual " + std::to_string(rmax) +
                                   " exceeds tolerance (ill-conditioned system)");
        sol.residual = std::max(sol.residual, rmax);
        sol.chi[static_cast<size_t>(d)] = chi;
        for (int e = 0; e < n; ++e) {
            Eigen::ArrayXd ve(m);
            for (Eigen::Index i = 0; i < m; ++i) ve[i] = g.nodes()[static_cast<size_t>(i)][e];
            sol.D(e, d) = g.quadrature(ve * chi);
        }
    }
    return sol;
}

}  // namespace fdl
