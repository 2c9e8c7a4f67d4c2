#include "fdl/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "fdl/quadrature.hpp"

namespace fdl {

// ---------------------------------------------------------------------------
// Mode sets and density fields
// ---------------------------------------------------------------------------

Vec ModeSet::wavevector(std::size_t flat) const {
    Vec k;
    k.dim = dim;
    std::size_t rest = flat;
    for (int d = 0; d < dim; ++d) {
        const int m = static_cast<int>(rest % static_cast<std::size_t>(modes_per_axis));
        rest /= static_cast<std::size_t>(modes_per_axis);
        const int wrapped = (m <= modes_per_axis / 2) ? m : m - modes_per_axis;
        k[d] = 2.0 * M_PI * wrapped / box_length;
    }
    return k;
}

std::size_t ModeSet::conjugate_index(std::size_t flat) const {
    std::size_t rest = flat, out = 0, stride = 1;
    for (int d = 0; d < dim; ++d) {
        const int m = static_cast<int>(rest % static_cast<std::size_t>(modes_per_axis));
        rest /= static_cast<std::size_t>(modes_per_axis);
        const int neg = (m == 0) ? 0 : modes_per_axis - m;
        out += static_cast<std::size_t>(neg) * stride;
        stride *= static_cast<std::size_t>(modes_per_axis);
    }
    return out;
}

double DensityField::mass() const {
    double vol = 1.0;
    for (int d = 0; d < modes.dim; ++d) vol *= modes.box_length;
    return vol * amplitudes[0].real();
}

double DensityField::eval1d(double x) const {
    if (modes.dim != 1) throw InvalidInput("eval1d: density is not one-dimensional");
    std::complex<double> s{0.0, 0.0};
    for (std::size_t m = 0; m < amplitudes.size(); ++m) {
        const double k = modes.wavevector(m)[0];
        s += amplitudes[m] * std::exp(std::complex<double>(0.0, k * x));
    }
    return s.real();
}

DensityField gaussian_density(const ModeSet& modes, double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("gaussian_density: sigma must be positive");
    DensityField rho;
    rho.modes = modes;
    rho.source = "gaussian-initial";
    rho.amplitudes.resize(modes.size());
    double vol = 1.0;
    for (int d = 0; d < modes.dim; ++d) vol *= modes.box_length;
    const double x0 = 0.5 * modes.box_length;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const Vec k = modes.wavevector(m);
        // exact transform of the (periodized) unit-mass Gaussian at box centre
        double phase = 0.0;
        for (int d = 0; d < modes.dim; ++d) phase += k[d] * x0;
        rho.amplitudes[m] = std::exp(-0.5 * sigma * sigma * k.norm2()) / vol *
                            std::exp(std::complex<double>(0.0, -phase));
    }
    return rho;
}

std::complex<double> PhaseSpaceField::mode_density(std::size_t m,
                                                   const Eigen::ArrayXd& weights) const {
    const auto col = values.col(static_cast<Eigen::Index>(m));
    std::complex<double> s{0.0, 0.0};
    for (Eigen::Index i = 0; i < col.size(); ++i) s += weights[i] * col[i];
    return s;
}

PhaseSpaceField well_prepared_field(const DensityField& rho0, const CollisionKernel& kernel,
                                    double eps) {
    PhaseSpaceField f;
    f.modes = rho0.modes;
    f.grid = kernel.grid_ptr();
    f.eps = eps;
    f.time = 0.0;
    const Eigen::ArrayXd& F = kernel.F_grid();
    f.values.resize(F.size(), static_cast<Eigen::Index>(rho0.amplitudes.size()));
    for (std::size_t m = 0; m < rho0.amplitudes.size(); ++m)
        f.values.col(static_cast<Eigen::Index>(m)) =
            F.cast<std::complex<double>>() * rho0.amplitudes[m];
    return f;
}

// ---------------------------------------------------------------------------
// Kinetic solver
// ---------------------------------------------------------------------------

namespace {

// backward-Euler collision phase, f <- (I + c (nu - K))^{-1} f, c = dt/theta
class CollisionStepper {
public:
    CollisionStepper(const CollisionKernel& kernel, double c)
        : kernel_(kernel), c_(c), F_(kernel.F_grid()), nu_(kernel.nu_grid()) {
        const Eigen::Index n = F_.size();
        denom_ = 1.0 + c_ * nu_;
        switch (kernel_.kind()) {
            case KernelKind::Bgk:
                break;
            case KernelKind::Separable: {
                tilt_.resize(n);
                const auto& nodes = kernel_.grid().nodes();
                for (Eigen::Index i = 0; i < n; ++i)
                    tilt_[i] = std::pow(bracket(nodes[static_cast<size_t>(i)]), kernel_.beta());
                const auto& w = kernel_.grid().weights();
                bsum_ = (w * tilt_ * tilt_ * F_ * c_ / denom_).sum();
                break;
            }
            default: {
                // dense backward-Euler matrix, factorized once
                const Eigen::MatrixXd& bm = kernel_.dense_b();
                Eigen::MatrixXd A(n, n);
                const auto& w = kernel_.grid().weights();
                for (Eigen::Index i = 0; i < n; ++i)
                    for (Eigen::Index j = 0; j < n; ++j) A(i, j) = -c_ * w[j] * bm(i, j) * F_[i];
                for (Eigen::Index i = 0; i < n; ++i) A(i, i) += 1.0 + c_ * nu_[i];
                lu_.compute(A);
                break;
            }
        }
    }

    void step(Eigen::ArrayXcd& f) const {
        switch (kernel_.kind()) {
            case KernelKind::Bgk: {
                // <F> = 1 on the grid, so the post-step density equals the
                // pre-step density exactly and the solve is closed-form
                const std::complex<double> rho = quad(f);
                f = (f + c_ * rho * F_.cast<std::complex<double>>()) / denom_;
                break;
            }
            case KernelKind::Separable: {
                Eigen::ArrayXcd fd = f / denom_;
                const std::complex<double> a = quad(fd * tilt_);
                const std::complex<double> j = a / (1.0 - bsum_);
                f = (f + (c_ * j) * (F_ * tilt_).cast<std::complex<double>>()) / denom_;
                break;
            }
            default: {
                Eigen::MatrixXd rhs(f.size(), 2);
                rhs.col(0) = f.real().matrix();
                rhs.col(1) = f.imag().matrix();
                const Eigen::MatrixXd sol = lu_.solve(rhs);
                f.real() = sol.col(0).array();
                f.imag() = sol.col(1).array();
                break;
            }
        }
    }

private:
    std::complex<double> quad(const Eigen::ArrayXcd& g) const {
        const auto& w = kernel_.grid().weights();
        std::complex<double> s{0.0, 0.0};
        for (Eigen::Index i = 0; i < g.size(); ++i) s += w[i] * g[i];
        return s;
    }

    const CollisionKernel& kernel_;
    double c_;
    Eigen::ArrayXd F_, nu_, tilt_, denom_;
    double bsum_ = 0.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace

KineticResult solve_kinetic(const CollisionKernel& kernel, const ScalingRegime& regime,
                            const PhaseSpaceField& f0, double T, double dt,
                            const std::vector<double>& snapshot_times) {
    if (!kernel.has_grid()) throw PreconditionError("solve_kinetic: kernel needs a grid");
    if (!(T > 0.0) || !(dt > 0.0)) throw InvalidInput("solve_kinetic: T, dt must be positive");
    const double eps = f0.eps;
    const double theta = regime.theta(eps);
    const auto& grid = kernel.grid();
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    if (f0.values.rows() != n) throw InvalidInput("solve_kinetic: field/grid mismatch");
    const Eigen::ArrayXd& F = kernel.F_grid();
    const Eigen::ArrayXd& nu = kernel.nu_grid();
    const Eigen::ArrayXd& w = grid.weights();

    const int nsteps = static_cast<int>(std::llround(T / dt));
    if (std::abs(nsteps * dt - T) > 1e-9 * T)
        throw InvalidInput("solve_kinetic: T must be an integer number of steps");

    // snapshot schedule in units of steps (always include T)
    std::vector<int> snap_steps;
    for (double ts : snapshot_times) {
        const int s = static_cast<int>(std::llround(ts / dt));
        if (s < 0 || s > nsteps || std::abs(s * dt - ts) > 1e-9 * std::max(ts, dt))
            throw InvalidInput("solve_kinetic: snapshot times must be step multiples in [0,T]");
        snap_steps.push_back(s);
    }
    if (snap_steps.empty() || snap_steps.back() != nsteps) snap_steps.push_back(nsteps);
    std::sort(snap_steps.begin(), snap_steps.end());
    snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

    const CollisionStepper collide(kernel, dt / theta);

    const std::size_t n_modes = f0.modes.size();
    // solve modes in the "lower half" and mirror the rest by conjugation
    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < n_modes; ++m)
        if (f0.modes.conjugate_index(m) >= m) active.push_back(m);

    struct ModeOut {
        std::vector<std::complex<double>> rho_at_snaps;
        std::vector<double> norm_at_snaps;
        std::vector<double> gnorm_at_snaps;
        Eigen::ArrayXcd final;
        double g_int = 0.0;
        double mass_drift = 0.0;  // relative, mode 0 only
    };
    std::vector<ModeOut> outs(active.size());

    parallel_for(active.size(), [&](std::size_t ia) {
        const std::size_t m = active[ia];
        const Vec k = f0.modes.wavevector(m);
        Eigen::ArrayXcd f = f0.values.col(static_cast<Eigen::Index>(m));
        // exact transport phase factors
        Eigen::ArrayXcd tr(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double om = eps * dot(grid.nodes()[static_cast<size_t>(i)], k) / theta;
            tr[i] = std::exp(std::complex<double>(0.0, -om * dt));
        }
        ModeOut& mo = outs[ia];
        auto wnorm = [&](const Eigen::ArrayXcd& g) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) s += w[i] * std::norm(g[i]) / F[i];
            return s;
        };
        auto record = [&]() {
            std::complex<double> rho{0, 0};
            for (Eigen::Index i = 0; i < n; ++i) rho += w[i] * f[i];
            mo.rho_at_snaps.push_back(rho);
            mo.norm_at_snaps.push_back(wnorm(f));
            Eigen::ArrayXcd g = f - rho * F.cast<std::complex<double>>();
            double gn = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) gn += w[i] * std::norm(g[i]) * nu[i] / F[i];
            mo.gnorm_at_snaps.push_back(gn);
        };

        std::size_t snap_idx = 0;
        if (snap_steps[snap_idx] == 0) {
            record();
            ++snap_idx;
        }
        double norm_prev = wnorm(f);
        const double mass0 = (m == 0) ? (w * f.real()).sum() : 0.0;
        for (int s = 1; s <= nsteps; ++s) {
            f *= tr;
            collide.step(f);
            const double norm_now = wnorm(f);
            if (norm_now > norm_prev * (1.0 + 1e-6))
                throw InstabilityError("solve_kinetic: weighted norm grew at step " +
                                       std::to_string(s));
            norm_prev = norm_now;
            {
                std::complex<double> rho{0, 0};
                for (Eigen::Index i = 0; i < n; ++i) rho += w[i] * f[i];
                Eigen::ArrayXcd g = f - rho * F.cast<std::complex<double>>();
                double gn = 0.0;
                for (Eigen::Index i = 0; i < n; ++i) gn += w[i] * std::norm(g[i]) * nu[i] / F[i];
                mo.g_int += gn * dt;
            }
            if (m == 0) {
                const double mass = (w * f.real()).sum();
                mo.mass_drift = std::max(mo.mass_drift,
                                         std::abs(mass - mass0) / std::max(std::abs(mass0), 1e-300));
            }
            if (snap_idx < snap_steps.size() && snap_steps[snap_idx] == s) {
                record();
                ++snap_idx;
            }
        }
        mo.final = f;
    });

    // assemble snapshots (deterministic order, mirrored modes by conjugation)
    KineticResult res;
    res.final_field.modes = f0.modes;
    res.final_field.grid = f0.grid;
    res.final_field.eps = eps;
    res.final_field.time = T;
    res.final_field.values.resize(n, static_cast<Eigen::Index>(n_modes));

    std::vector<std::size_t> where(n_modes, 0);
    for (std::size_t ia = 0; ia < active.size(); ++ia) where[active[ia]] = ia;

    for (std::size_t si = 0; si < snap_steps.size(); ++si) {
        KineticSnapshot snap;
        snap.time = snap_steps[si] * dt;
        snap.rho.modes = f0.modes;
        snap.rho.source = "kinetic";
        snap.rho.time = snap.time;
        snap.rho.amplitudes.resize(n_modes);
        for (std::size_t m = 0; m < n_modes; ++m) {
            const std::size_t cm = f0.modes.conjugate_index(m);
            if (cm >= m) {
                snap.rho.amplitudes[m] = outs[where[m]].rho_at_snaps[si];
            } else {
                snap.rho.amplitudes[m] = std::conj(outs[where[cm]].rho_at_snaps[si]);
            }
        }
        for (std::size_t ia = 0; ia < active.size(); ++ia) {
            const std::size_t m = active[ia];
            const double mult = (f0.modes.conjugate_index(m) == m) ? 1.0 : 2.0;
            snap.weighted_norm += mult * outs[ia].norm_at_snaps[si];
            snap.g_norm_nu += mult * outs[ia].gnorm_at_snaps[si];
        }
        res.snapshots.push_back(std::move(snap));
    }

    for (std::size_t m = 0; m < n_modes; ++m) {
        const std::size_t cm = f0.modes.conjugate_index(m);
        if (cm >= m)
            res.final_field.values.col(static_cast<Eigen::Index>(m)) = outs[where[m]].final;
        else
            res.final_field.values.col(static_cast<Eigen::Index>(m)) =
                outs[where[cm]].final.conjugate();
    }
    for (std::size_t ia = 0; ia < active.size(); ++ia) {
        const std::size_t m = active[ia];
        const double mult = (f0.modes.conjugate_index(m) == m) ? 1.0 : 2.0;
        res.g_norm_sq_time_integral += mult * outs[ia].g_int;
        res.mass_drift = std::max(res.mass_drift, outs[ia].mass_drift);
    }
    return res;
}

std::pair<DensityField, PhaseSpaceField> decompose(const PhaseSpaceField& field,
                                                   const CollisionKernel& kernel) {
    const Eigen::ArrayXd& F = kernel.F_grid();
    const Eigen::ArrayXd& w = kernel.grid().weights();
    DensityField rho;
    rho.modes = field.modes;
    rho.time = field.time;
    rho.source = "decompose";
    rho.amplitudes.resize(field.modes.size());
    PhaseSpaceField g = field;
    for (std::size_t m = 0; m < field.modes.size(); ++m) {
        std::complex<double> r{0, 0};
        const auto col = field.values.col(static_cast<Eigen::Index>(m));
        for (Eigen::Index i = 0; i < col.size(); ++i) r += w[i] * col[i];
        rho.amplitudes[m] = r;
        g.values.col(static_cast<Eigen::Index>(m)) -= r * F.cast<std::complex<double>>();
    }
    return {std::move(rho), std::move(g)};
}

DensityField solve_fractional_heat(double kappa, double gamma, const DensityField& rho0,
                                   double T) {
    if (!(gamma > 0.0 && gamma <= 2.0))
        throw InvalidInput("solve_fractional_heat: gamma must lie in (0,2]");
    if (!(kappa > 0.0)) throw InvalidInput("solve_fractional_heat: kappa must be positive");
    DensityField out = rho0;
    out.time = rho0.time + T;
    out.source = "fractional-heat";
    for (std::size_t m = 0; m < out.amplitudes.size(); ++m) {
        const double k = rho0.modes.wavevector(m).norm();
        out.amplitudes[m] *= std::exp(-kappa * std::pow(k, gamma) * T);
    }
    return out;
}

DensityField solve_classical_heat(const Eigen::MatrixXd& D, const DensityField& rho0, double T) {
    if (D.rows() != rho0.modes.dim || D.cols() != rho0.modes.dim)
        throw InvalidInput("solve_classical_heat: D has wrong shape");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, D.cwiseAbs().maxCoeff()))
        throw InvalidInput("solve_classical_heat: D must be symmetric");
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff()))
        throw InvalidInput("solve_classical_heat: D must be positive semidefinite");
    DensityField out = rho0;
    out.time = rho0.time + T;
    out.source = "classical-heat";
    for (std::size_t m = 0; m < out.amplitudes.size(); ++m) {
        const Vec k = rho0.modes.wavevector(m);
        double kdk = 0.0;
        for (int a = 0; a < rho0.modes.dim; ++a)
            for (int b = 0; b < rho0.modes.dim; ++b) kdk += k[a] * D(a, b) * k[b];
        out.amplitudes[m] *= std::exp(-kdk * T);
    }
    return out;
}

double relative_l2_distance(const DensityField& a, const DensityField& b) {
    if (!(a.modes == b.modes)) throw InvalidInput("relative_l2_distance: mode sets differ");
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < a.amplitudes.size(); ++m) {
        num += std::norm(a.amplitudes[m] - b.amplitudes[m]);
        den += std::norm(b.amplitudes[m]);
    }
    if (den == 0.0) throw InvalidInput("relative_l2_distance: reference field is zero");
    return std::sqrt(num / den);
}

std::vector<double> stable_profile(double kappa, double gamma, double t,
                                   const std::vector<double>& x_grid) {
    if (!(gamma > 0.0 && gamma <= 2.0)) throw InvalidInput("stable_profile: gamma in (0,2]");
    if (!(t > 0.0)) throw InvalidInput("stable_profile: t must be positive");
    // truncation where the multiplier reaches 1e-18
    const double K = std::pow(41.0 / (kappa * t), 1.0 / gamma);
    std::vector<double> out(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        const double x = std::abs(x_grid[i]);
        auto f = [&](double k) { return std::exp(-kappa * t * std::pow(k, gamma)) * std::cos(k * x); };
        double val = 0.0;
        if (x * K < 8.0) {
            val = integrate(f, 0.0, K, 1e-12).value;
        } else {
            // oscillatory: integrate half-period panels and sum pairwise
            const double h = M_PI / x;
            std::vector<double> panels;
            for (double a = 0.0; a < K; a += h)
                panels.push_back(gl_integrate(f, a, std::min(a + h, K), 12));
            val = pairwise_sum(panels);
        }
        out[i] = val / M_PI;
    });
    for (double v : out)
        if (v < -1e-6)
            throw ResolutionError("stable_profile: negative density; refine the k-grid");
    return out;
}

}  // namespace fdl
