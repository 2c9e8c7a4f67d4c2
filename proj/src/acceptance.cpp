#include "fdl/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fdl/montecarlo.hpp"
#include "fdl/rng.hpp"
#include "fdl/solvers.hpp"
#include "fdl/symbol.hpp"

namespace fdl {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- shared fixtures -------------------------------------------------------

// alpha = 1 reference equilibrium: uniform core, exact tail from r = 1
std::shared_ptr<const HeavyTailEquilibrium> eq_alpha1() {
    static auto eq = std::make_shared<HeavyTailEquilibrium>(
        HeavyTailEquilibrium::uniform_core(1, 1.0, 1.0, 1.0));
    return eq;
}

// alpha = 1.5 equilibrium for the critical / kernel-window checks
std::shared_ptr<const HeavyTailEquilibrium> eq_alpha15() {
    static auto eq = std::make_shared<HeavyTailEquilibrium>(
        HeavyTailEquilibrium::uniform_core(1, 1.5, 1.0, 1.0));
    return eq;
}

// solver grid calibrated for the alpha = 1 runs: 512 signed nodes, linear
// resolution through the oscillation-relevant range, geometric far field
GridSpec1D solver_grid_spec() {
    GridSpec1D s;
    s.r_cut = 1.0;
    s.core_nodes = 16;
    s.panels = 16;
    s.panel_width = 2.0;
    s.nodes_per_panel = 10;
    s.geo_nodes = 8;
    s.r_outer = 33.0 * 1024.0;
    return s;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// one kinetic-vs-multiplier comparison; returns (rel L2 error, g-norm integral)
struct KineticRun {
    double rel_err = 0.0;
    double g_int = 0.0;
    double mass_drift = 0.0;
};

KineticRun kinetic_vs_limit(const CollisionKernel& kernel, const ScalingRegime& regime,
                            double kappa, double gamma, double eps, int modes, double box,
                            double sigma, double T, double dt) {
    ModeSet ms;
    ms.box_length = box;
    ms.modes_per_axis = modes;
    ms.dim = 1;
    const DensityField rho0 = gaussian_density(ms, sigma);
    const PhaseSpaceField f0 = well_prepared_field(rho0, kernel, eps);
    const KineticResult kin = solve_kinetic(kernel, regime, f0, T, dt);
    const DensityField limit = solve_fractional_heat(kappa, gamma, rho0, T);
    KineticRun out;
    out.rel_err = relative_l2_distance(kin.snapshots.back().rho, limit);
    out.g_int = kin.g_norm_sq_time_integral;
    out.mass_drift = kin.mass_drift;
    return out;
}

}  // namespace

AcceptanceReport run_acceptance(const AcceptanceOptions& opt) {
    AcceptanceReport report;
    auto wants = [&](const std::string& id) {
        return opt.only.empty() ||
               std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end();
    };
    auto emit = [&](CriterionResult r) {
        if (opt.verbose) {
            std::printf("%-4s %-4s measured=%-12s target=%-12s tol=%-10s [%6.2f s] %s\n",
                        r.id.c_str(), r.pass ? "PASS" : "FAIL", fmt(r.measured).c_str(),
                        fmt(r.target).c_str(), fmt(r.tolerance).c_str(), r.wall_s,
                        r.detail.c_str());
            std::fflush(stdout);
        }
        report.criteria.push_back(std::move(r));
    };

    const SlowlyVarying one = SlowlyVarying::constant();

    // ---------------------------------------------------------------- A1
    if (wants("A1")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A1";
        r.description = "fractional kappa: quadrature vs closed form (N=1, beta=0)";
        r.tolerance = 1e-6;
        double worst = 0.0;
        std::ostringstream det;
        for (double alpha : {0.5, 1.0, 1.5}) {
            const ScalingRegime reg = classify(alpha, 0.0, one);
            const KappaValue kv = kappa_fractional(reg, 1.0, 1.0, 1);
            const double exact = M_PI / std::sin(0.5 * M_PI * alpha);
            const double rel = std::abs(kv.quadrature - exact) / exact;
            worst = std::max(worst, rel);
            det << "alpha=" << alpha << ": " << fmt(rel) << "  ";
        }
        r.measured = worst;
        r.target = 0.0;
        r.pass = worst <= r.tolerance;
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // shared alpha = 1 fixtures
    auto eqA = eq_alpha1();
    const ScalingRegime regA = classify(1.0, 0.0, one);
    const CollisionKernel kernelA = CollisionKernel::bgk(eqA);
    const double kappaA = kappa_fractional(regA, eqA->tail_constant(), 1.0, 1).kappa;
    const double kappaA_used = kappaA * opt.kappa_scale;

    // ---------------------------------------------------------------- A2
    if (wants("A2")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A2";
        r.description = "symbol limit: |a_eps - (-1-kappa)| monotone, < 2% at eps = 1e-4";
        const double limit = -1.0 - kappaA_used;
        std::vector<double> errs;
        bool monotone = true;
        std::ostringstream det;
        for (double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
            const SymbolValue sv = a_eps(kernelA, regA, 1.0, Vec(1.0), e);
            const double err = std::abs(sv.a_eps.real() - limit);
            if (!errs.empty() && err >= errs.back()) monotone = false;
            errs.push_back(err);
            det << "eps=" << fmt(e) << ": " << fmt(err) << "  ";
        }
        r.measured = errs.back() / std::abs(limit);
        r.target = 0.0;
        r.tolerance = 0.02;
        r.pass = monotone && r.measured < r.tolerance;
        if (!monotone) det << "(non-monotone)";
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A3
    if (wants("A3")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A3";
        r.description = "symbol bound |a_eps| <= |p| + kappa |k|^alpha on a 5x5x4 grid";
        r.tolerance = 1e-8;
        double worst = -1e300;
        for (double p : {0.0, 0.5, 1.0, 2.0, 4.0})
            for (double k : {0.25, 0.5, 1.0, 2.0, 4.0})
                for (double e : {1e-1, 1e-2, 1e-3, 1e-4}) {
                    const SymbolValue sv = a_eps(kernelA, regA, p, Vec(k), e);
                    const double bound = p + kappaA * k;  // alpha = 1
                    worst = std::max(worst, std::abs(sv.a_eps) - bound);
                }
        r.measured = worst;
        r.target = 0.0;
        r.pass = worst <= r.tolerance;
        r.detail = "max(|a| - bound) over the grid";
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A4
    if (wants("A4")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A4";
        r.description = "coercivity for all four kernel kinds, 100 random grid functions each";
        GridSpec1D gs;  // generic 1-D grid to the default truncation radius
        gs.r_cut = 1.0;
        gs.r_outer = 1e3;
        auto grid = VelocityGrid::build_1d(gs);
        auto eq15 = eq_alpha15();
        std::vector<CollisionKernel> kernels;
        kernels.push_back(CollisionKernel::bgk(eqA, grid));
        kernels.push_back(CollisionKernel::separable(eq15, 0.5, grid));
        kernels.push_back(CollisionKernel::shifted(eq15, 0.5, grid));
        kernels.push_back(CollisionKernel::physical(eq15, 0.5, grid));
        double worst_gap = -1e300;
        int failures = 0;
        std::ostringstream det;
        for (const auto& kernel : kernels) {
            const B3Report b3 = kernel.b3_check();
            if (!b3.pass) ++failures;
            const Eigen::ArrayXd& F = kernel.F_grid();
            RandomStream rng(777, 0);
            for (int trial = 0; trial < 100; ++trial) {
                Eigen::ArrayXd f(F.size());
                for (Eigen::Index i = 0; i < f.size(); ++i)
                    f[i] = F[i] * (2.0 * rng.uniform() - 1.0);
                const CoercivityReport cr = kernel.coercivity_check(f);
                worst_gap = std::max(worst_gap, cr.lhs - cr.rhs);
                if (!cr.pass) ++failures;
            }
            det << "M=" << fmt(b3.m_observed) << "  ";
        }
        r.measured = static_cast<double>(failures);
        r.target = 0.0;
        r.tolerance = 0.0;
        r.pass = failures == 0;
        det << "worst lhs-rhs gap " << fmt(worst_gap);
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ------------------------------------------------------------ A5 + A6
    if (wants("A5") || wants("A6")) {
        const auto t0 = Clock::now();
        auto grid = VelocityGrid::build_1d(solver_grid_spec());
        const CollisionKernel kernel = CollisionKernel::bgk(eqA, grid);
        const double dt = 1.0 / 2048.0;
        std::vector<double> eps_list{0.04, 0.02, 0.01};
        std::vector<KineticRun> runs;
        for (double e : eps_list)
            runs.push_back(
                kinetic_vs_limit(kernel, regA, kappaA_used, 1.0, e, 256, 40.0, 1.0, 1.0, dt));
        const double tA5 = seconds_since(t0);

        if (wants("A5")) {
            CriterionResult r;
            r.id = "A5";
            r.description = "kinetic vs fractional heat: rel L2 < 15% at eps=0.02, smaller at 0.01";
            r.measured = runs[1].rel_err;
            r.target = 0.0;
            r.tolerance = 0.15;
            r.pass = runs[1].rel_err < 0.15 && runs[2].rel_err < runs[1].rel_err;
            std::ostringstream det;
            det << "err(0.04)=" << fmt(runs[0].rel_err) << " err(0.02)=" << fmt(runs[1].rel_err)
                << " err(0.01)=" << fmt(runs[2].rel_err)
                << " mass drift " << fmt(runs[1].mass_drift);
            r.detail = det.str();
            r.wall_s = tA5;
            emit(std::move(r));
        }
        if (wants("A6")) {
            CriterionResult r;
            r.id = "A6";
            r.description = "fluctuation norm: log-log slope of time-integrated g vs theta";
            std::vector<double> lx, ly;
            for (std::size_t i = 0; i < eps_list.size(); ++i) {
                lx.push_back(std::log(regA.theta(eps_list[i])));
                ly.push_back(std::log(runs[i].g_int));
            }
            r.measured = fit_slope(lx, ly);
            r.target = 1.0;
            r.tolerance = 0.15;
            r.pass = std::abs(r.measured - r.target) <= r.tolerance;
            r.detail = "g integrals " + fmt(runs[0].g_int) + ", " + fmt(runs[1].g_int) + ", " +
                       fmt(runs[2].g_int);
            r.wall_s = seconds_since(t0) - tA5;
            emit(std::move(r));
        }
    }

    // critical-case fixtures (A7, A9)
    auto eq15 = eq_alpha15();
    const CollisionKernel kernel15 = CollisionKernel::separable(eq15, 0.5);
    const ScalingRegime regCrit = classify(1.5, 0.5, one);

    // ---------------------------------------------------------------- A7
    if (wants("A7")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A7";
        r.description = "critical case: d_eps -> kappa |k|^2 on the log time scale";
        const KappaValue kc =
            kappa_critical(1.5, 0.5, eq15->tail_constant(), kernel15.nu0(), 1);
        std::vector<double> errs;
        bool monotone = true;
        std::ostringstream det;
        for (double e : {1e-2, 1e-3, 1e-4}) {
            const double d = d_eps(kernel15, regCrit, 0.0, Vec(1.0), e);
            const double rel = std::abs(d - kc.kappa) / kc.kappa;
            if (!errs.empty() && rel >= errs.back()) monotone = false;
            errs.push_back(rel);
            det << "eps=" << fmt(e) << ": " << fmt(rel) << "  ";
        }
        det << "kappa_crit=" << fmt(kc.kappa) << " (lambda-sweep " << fmt(kc.quadrature) << ")";
        r.measured = errs.back();
        r.target = 0.0;
        r.tolerance = 0.10;
        r.pass = monotone && errs.back() <= 0.10;
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A8
    if (wants("A8")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A8";
        r.description = "classical regime: cell-problem D = Gaussian second moment; kinetic vs heat";
        auto eqG = std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::gaussian_bulk(1, 4.0, 8.0));
        GridSpec1D gs;
        gs.r_cut = 8.0;
        gs.core_nodes = 48;
        gs.panels = 12;
        gs.panel_width = 2.0;
        gs.nodes_per_panel = 10;
        gs.geo_nodes = 8;
        gs.r_outer = 64.0;
        auto grid = VelocityGrid::build_1d(gs);
        const CollisionKernel kernel = CollisionKernel::bgk(eqG, grid);
        const CellProblemSolution cell = kernel.solve_cell_problem();
        const double D = cell.D(0, 0);
        const ScalingRegime regC = classify(4.0, 0.0, one);
        std::vector<double> errs;
        for (double e : {0.1, 0.05})
            errs.push_back(kinetic_vs_limit(kernel, regC, D, 2.0, e, 128, 40.0, 1.0, 1.0,
                                            1.0 / 2048.0)
                               .rel_err);
        r.measured = std::abs(D - 1.0);
        r.target = 0.0;
        r.tolerance = 1e-6;
        r.pass = r.measured <= 1e-6 && errs[1] < errs[0];
        char dbuf[32];
        std::snprintf(dbuf, sizeof dbuf, "%.12g", D);
        std::ostringstream det;
        det << "D=" << dbuf << " err(0.1)=" << fmt(errs[0]) << " err(0.05)=" << fmt(errs[1])
            << " residual=" << fmt(cell.residual);
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A9
    if (wants("A9")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A9";
        r.description = "remainder exponent: slope of c_eps >= min(gamma/2,1) - 0.02";
        const std::vector<double> eps_list{1e-2, 1e-3, 1e-4};
        const RemainderReport rep1 = remainder_probe(kernelA, regA, 1.0, Vec(1.0), eps_list);
        const RemainderReport rep2 = remainder_probe(kernel15, regCrit, 0.0, Vec(1.0), eps_list);
        r.measured = std::min(rep1.slope - rep1.floor, rep2.slope - rep2.floor);
        r.target = 0.0;
        r.tolerance = 0.0;
        r.pass = rep1.pass && rep2.pass;
        std::ostringstream det;
        det << "fractional slope " << fmt(rep1.slope) << " (floor " << fmt(rep1.floor)
            << "), critical slope " << fmt(rep2.slope) << " (floor " << fmt(rep2.floor) << ")";
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A10
    if (wants("A10")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A10";
        r.description = "Monte Carlo limit law: |cf| within 3 SE of exp(-kappa k t); slope 1/gamma";
        auto eqC = std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::smooth_profile(1, 1.0, 1.0));
        auto kernelC = std::make_shared<const CollisionKernel>(CollisionKernel::bgk(eqC));
        const ScalingRegime reg = classify(1.0, 0.0, one);
        const double kappa = kappa_fractional(reg, eqC->tail_constant(), 1.0, 1).kappa;

        JumpProcessParams params;
        params.kernel = kernelC;
        params.regime = reg;
        params.eps = 0.02;
        params.horizon = 8.0;
        params.n_particles = 1000000;
        params.seed = 20260809;
        params.snapshot_times = {1.0, 2.0, 4.0, 8.0};
        const SimulationResult sim = simulate(params);

        const std::vector<Vec> ks{Vec(0.5), Vec(1.0), Vec(2.0)};
        const auto cfs = empirical_cf(sim.snapshots.front(), ks);
        double worst_sigmas = 0.0;
        std::ostringstream det;
        bool cf_ok = true;
        for (const auto& c : cfs) {
            const double target = std::exp(-kappa * c.k.norm() * 1.0);
            const double dev = std::abs(std::abs(c.cf) - target);
            const double sig = dev / c.se_abs;
            worst_sigmas = std::max(worst_sigmas, sig);
            if (dev > 3.0 * c.se_abs) cf_ok = false;
            det << "k=" << fmt(c.k.norm()) << ": " << fmt(sig) << "SE  ";
        }
        const DisplacementReport disp = displacement_scaling(sim.snapshots, 0.5);
        const bool slope_ok = std::abs(disp.slope - 1.0) <= 0.05;  // 1/gamma = 1
        det << "quantile slope " << fmt(disp.slope);
        r.measured = worst_sigmas;
        r.target = 0.0;
        r.tolerance = 3.0;
        r.pass = cf_ok && slope_ok;
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A11
    if (wants("A11")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A11";
        r.description = "regime map: gamma(0)=alpha, gamma monotone in beta, classical window";
        int violations = 0;
        // beta = 0 gives gamma = alpha
        for (double alpha : {0.25, 0.5, 1.0, 1.5, 1.99}) {
            const ScalingRegime reg = classify(alpha, 0.0, one);
            if (reg.kind != RegimeKind::Fractional || std::abs(reg.gamma - alpha) > 1e-12)
                ++violations;
        }
        // monotonicity of gamma(beta) on dense grids
        auto scan = [&](double alpha, int expect_sign) {
            double prev = 0.0;
            bool first = true;
            for (int i = 0; i <= 400; ++i) {
                const double hi = std::min({1.0, alpha, 2.0 - alpha});
                const double beta = -3.0 + (hi - 1e-6 + 3.0) * i / 400.0;
                const ScalingRegime reg = classify(alpha, beta, one);
                if (!first) {
                    const double diff = reg.gamma - prev;
                    if (expect_sign > 0 && diff <= 0) ++violations;
                    if (expect_sign < 0 && diff >= 0) ++violations;
                    if (expect_sign == 0 && std::abs(diff) > 1e-12) ++violations;
                }
                prev = reg.gamma;
                first = false;
            }
        };
        scan(0.5, -1);
        scan(1.0, 0);
        scan(1.5, +1);
        // gamma stays inside (0,2) on the fractional domain
        for (int i = 1; i < 60; ++i) {
            const double beta = -8.0 + 8.0 * i / 60.0;
            const ScalingRegime reg = classify(1.5, beta, one);
            if (reg.kind == RegimeKind::Fractional && !(reg.gamma > 0.0 && reg.gamma < 2.0))
                ++violations;
        }
        // beta > 2 - alpha with alpha > 1 is classical
        for (auto [alpha, beta] : std::vector<std::pair<double, double>>{
                 {3.0, 0.0}, {2.5, 0.9}, {1.5, 0.6}}) {
            if (classify(alpha, beta, one).kind != RegimeKind::Classical) ++violations;
        }
        r.measured = violations;
        r.target = 0.0;
        r.tolerance = 0.0;
        r.pass = violations == 0;
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    // ---------------------------------------------------------------- A12
    if (wants("A12")) {
        const auto t0 = Clock::now();
        CriterionResult r;
        r.id = "A12";
        r.description = "|v-v'|^beta kernels: nu slope = beta, bound check windows";
        double worst_slope_err = 0.0;
        int failures = 0;
        std::ostringstream det;
        for (double beta : {-0.3, 0.0, 0.5}) {
            const CollisionKernel kernel = CollisionKernel::physical(eq15, beta);
            const double slope = std::log(kernel.nu_radial(1e4) / kernel.nu_radial(1e2)) /
                                 std::log(1e2);
            worst_slope_err = std::max(worst_slope_err, std::abs(slope - beta));
            const B3Report b3 = kernel.b3_check();
            if (!b3.pass) ++failures;
            det << "beta=" << fmt(beta) << ": slope " << fmt(slope) << "  ";
        }
        for (double beta : {1.2, -0.6}) {
            CollisionKernel::Options uo;
            uo.unchecked = true;
            const CollisionKernel kernel =
                CollisionKernel::physical(eq15, beta, nullptr, uo);
            const B3Report b3 = kernel.b3_check();
            if (b3.pass) ++failures;  // must fail outside the window
            det << "beta=" << fmt(beta) << ": " << (b3.pass ? "bounded?!" : "diverges") << "  ";
        }
        r.measured = worst_slope_err;
        r.target = 0.0;
        r.tolerance = 0.05;
        r.pass = worst_slope_err <= 0.05 && failures == 0;
        r.detail = det.str();
        r.wall_s = seconds_since(t0);
        emit(std::move(r));
    }

    report.all_pass = true;
    for (const auto& c : report.criteria) report.all_pass = report.all_pass && c.pass;

    if (!opt.out_dir.empty()) {
        nlohmann::json j;
        j["all_pass"] = report.all_pass;
        j["version"] = kVersion;
        for (const auto& c : report.criteria) {
            nlohmann::json jc;
            jc["id"] = c.id;
            jc["description"] = c.description;
            jc["pass"] = c.pass;
            jc["measured"] = c.measured;
            jc["target"] = c.target;
            jc["tolerance"] = c.tolerance;
            jc["detail"] = c.detail;
            jc["wall_s"] = c.wall_s;
            j["criteria"].push_back(jc);
        }
        std::ofstream out(opt.out_dir + "/acceptance_report.json");
        out << j.dump(2) << "\n";
    }
    return report;
}

}  // namespace fdl
