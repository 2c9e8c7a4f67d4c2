// fdl — anomalous diffusion limits of linear kinetic equations.
// Subcommands: classify, kappa, symbol-sweep, solve, mc, sweep, accept.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fdl/acceptance.hpp"
#include "fdl/config.hpp"
#include "fdl/montecarlo.hpp"
#include "fdl/records.hpp"
#include "fdl/solvers.hpp"
#include "fdl/sweep.hpp"
#include "fdl/symbol.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCellFailure = 1;
constexpr int kExitInvalidConfig = 2;

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = ".";
    long seed = -1;
    int threads = 0;
};

fdl::Config load_config(const GlobalArgs& g) {
    fdl::Config cfg;
    if (!g.config_path.empty()) cfg = fdl::Config::parse_file(g.config_path);
    if (g.seed >= 0) cfg.set_int("mc.seed", g.seed);
    if (!g.out_dir.empty()) cfg.set("output.dir", g.out_dir);
    return cfg;
}

void print_kappa(const fdl::KappaValue& kv) {
    std::printf("kappa        = %.12g\n", kv.kappa);
    std::printf("gamma        = %.12g\n", kv.gamma);
    std::printf("method       = %s\n", kv.method.c_str());
    std::printf("quadrature   = %.12g\n", kv.quadrature);
    if (std::isfinite(kv.closed_form)) std::printf("closed form  = %.12g\n", kv.closed_form);
}

int cmd_classify(double alpha, double beta, const std::string& ell_kind, double ell_param) {
    fdl::Config c;
    c.set("equilibrium.ell.kind", ell_kind);
    c.set_double("equilibrium.ell.param", ell_param);
    const fdl::SlowlyVarying ell = fdl::make_ell(c);
    const fdl::ScalingRegime reg = fdl::classify(alpha, beta, ell);
    std::printf("regime  = %s\n", reg.kind_name().c_str());
    std::printf("gamma   = %.12g\n", reg.gamma);
    std::printf("alpha   = %.12g\n", reg.alpha);
    std::printf("beta    = %.12g\n", reg.beta);
    std::printf("ell     = %s\n", reg.ell.describe().c_str());
    std::printf("theta   : %s\n", reg.theta_formula().c_str());
    if (reg.critical_log_fallback)
        std::printf("warning : ell ln does not diverge; fell back to the classical scale\n");
    return kExitOk;
}

int cmd_kappa(const fdl::Config& cfg_in) {
    const fdl::Config cfg = fdl::with_defaults(cfg_in);
    auto eq = fdl::make_equilibrium(cfg);
    auto kernel = fdl::make_kernel(cfg, eq, nullptr);
    const fdl::ScalingRegime reg = fdl::make_regime(cfg, *eq, *kernel);
    std::printf("regime       = %s\n", reg.kind_name().c_str());
    if (reg.kind == fdl::RegimeKind::Fractional) {
        print_kappa(fdl::kappa_fractional(reg, eq->tail_constant(), kernel->nu0(), eq->dim()));
    } else if (reg.kind == fdl::RegimeKind::Critical) {
        print_kappa(
            fdl::kappa_critical(reg.alpha, reg.beta, eq->tail_constant(), kernel->nu0(), eq->dim()));
    } else {
        auto grid = fdl::make_grid(cfg, *eq);
        auto gk = fdl::make_kernel(cfg, eq, grid);
        const auto cell = gk->solve_cell_problem();
        std::printf("D            = %.12g\n", cell.D(0, 0));
        std::printf("residual     = %.3g\n", cell.residual);
    }
    return kExitOk;
}

int cmd_symbol_sweep(const fdl::Config& cfg) {
    const fdl::SweepResult res = fdl::run_sweep(cfg);
    std::printf("%zu cells, %d failed; wrote sweep.csv\n", res.records.size(), res.failed_cells);
    return res.failed_cells == 0 ? kExitOk : kExitCellFailure;
}

int cmd_solve(const fdl::Config& cfg_in, const std::string& equation, bool compare) {
    const fdl::Config cfg = fdl::with_defaults(cfg_in);
    auto eq = fdl::make_equilibrium(cfg);
    const std::string dir = cfg.get_string("output.dir", ".");

    fdl::ModeSet modes;
    modes.box_length = cfg.get_double("solver.box_length", 40.0);
    modes.modes_per_axis = static_cast<int>(cfg.get_int("solver.modes", 256));
    modes.dim = eq->dim();
    const double T = cfg.get_double("solver.T", 1.0);
    const double sigma = cfg.get_double("solver.sigma", 1.0);
    const fdl::DensityField rho0 = fdl::gaussian_density(modes, sigma);

    auto write_density = [&](const fdl::DensityField& rho, const std::string& name) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t m = 0; m < rho.amplitudes.size(); ++m) {
            rows.push_back({fdl::format_full(rho.modes.wavevector(m)[0]),
                            fdl::format_full(rho.amplitudes[m].real()),
                            fdl::format_full(rho.amplitudes[m].imag())});
        }
        fdl::write_csv(dir + "/" + name + ".csv", {"k", "re_rho", "im_rho"}, rows);
    };

    nlohmann::json summary;
    summary["config_hash"] = fdl::hash_hex(cfg.hash());
    summary["T"] = T;

    fdl::DensityField kin_rho, lim_rho;
    bool have_kin = false, have_lim = false;

    if (equation == "kinetic" || compare) {
        auto grid = fdl::make_grid(cfg, *eq);
        auto kernel = fdl::make_kernel(cfg, eq, grid);
        const fdl::ScalingRegime reg = fdl::make_regime(cfg, *eq, *kernel);
        const double eps = cfg.get_double("solver.eps", 0.05);
        const double dt = cfg.get_double("solver.dt", T / 2048.0);
        const fdl::PhaseSpaceField f0 = fdl::well_prepared_field(rho0, *kernel, eps);
        const fdl::KineticResult res = fdl::solve_kinetic(*kernel, reg, f0, T, dt);
        kin_rho = res.snapshots.back().rho;
        have_kin = true;
        write_density(kin_rho, "rho_kinetic");
        summary["kinetic"]["eps"] = eps;
        summary["kinetic"]["mass"] = kin_rho.mass();
        summary["kinetic"]["mass_drift"] = res.mass_drift;
        summary["kinetic"]["weighted_norm"] = res.snapshots.back().weighted_norm;
        summary["kinetic"]["g_norm_sq_time_integral"] = res.g_norm_sq_time_integral;
    }
    if (equation == "frac" || (compare && equation != "heat")) {
        auto kernel = fdl::make_kernel(cfg, eq, nullptr);
        const fdl::ScalingRegime reg = fdl::make_regime(cfg, *eq, *kernel);
        const fdl::KappaValue kv =
            reg.kind == fdl::RegimeKind::Critical
                ? fdl::kappa_critical(reg.alpha, reg.beta, eq->tail_constant(), kernel->nu0(),
                                      eq->dim())
                : fdl::kappa_fractional(reg, eq->tail_constant(), kernel->nu0(), eq->dim());
        lim_rho = fdl::solve_fractional_heat(kv.kappa, reg.gamma, rho0, T);
        have_lim = true;
        write_density(lim_rho, "rho_limit");
        summary["limit"]["kappa"] = kv.kappa;
        summary["limit"]["gamma"] = kv.gamma;
        summary["limit"]["mass"] = lim_rho.mass();
    }
    if (equation == "heat") {
        auto grid = fdl::make_grid(cfg, *eq);
        auto kernel = fdl::make_kernel(cfg, eq, grid);
        const auto cell = kernel->solve_cell_problem();
        lim_rho = fdl::solve_classical_heat(cell.D, rho0, T);
        have_lim = true;
        write_density(lim_rho, "rho_limit");
        summary["limit"]["D"] = cell.D(0, 0);
        summary["limit"]["mass"] = lim_rho.mass();
    }
    if (compare && have_kin && have_lim) {
        summary["compare"]["rel_l2"] = fdl::relative_l2_distance(kin_rho, lim_rho);
    }
    std::ofstream js(dir + "/solve_summary.json");
    js << summary.dump(2) << "\n";
    std::printf("%s\n", summary.dump(2).c_str());
    return kExitOk;
}

int cmd_mc(const fdl::Config& cfg_in, const std::string& snapshots_arg, bool dump_positions) {
    const fdl::Config cfg = fdl::with_defaults(cfg_in);
    auto eq = fdl::make_equilibrium(cfg);
    auto kernel = std::shared_ptr<const fdl::CollisionKernel>(fdl::make_kernel(cfg, eq, nullptr));
    const fdl::ScalingRegime reg = fdl::make_regime(cfg, *eq, *kernel);
    const std::string dir = cfg.get_string("output.dir", ".");

    fdl::JumpProcessParams params;
    params.kernel = kernel;
    params.regime = reg;
    params.eps = cfg.get_double("mc.eps", 0.05);
    params.horizon = cfg.get_double("mc.T", 1.0);
    params.n_particles = static_cast<std::size_t>(cfg.get_int("mc.particles", 100000));
    params.seed = static_cast<uint64_t>(cfg.get_int("mc.seed", 1));
    if (!snapshots_arg.empty()) {
        fdl::Config tmp;
        tmp.set("x", snapshots_arg);
        params.snapshot_times = tmp.get_list("x");
        params.horizon = params.snapshot_times.back();
    }
    const fdl::SimulationResult sim = fdl::simulate(params);

    nlohmann::json summary;
    summary["config_hash"] = fdl::hash_hex(cfg.hash());
    summary["particles"] = params.n_particles;
    summary["eps"] = params.eps;

    const std::vector<double> kvals = cfg.get_list("mc.k", {0.5, 1.0, 2.0});
    for (std::size_t s = 0; s < sim.snapshots.size(); ++s) {
        const auto& e = sim.snapshots[s];
        std::vector<fdl::Vec> ks;
        for (double k : kvals) ks.push_back(fdl::Vec(k));
        const auto cfs = fdl::empirical_cf(e, ks);
        std::vector<std::vector<std::string>> rows;
        for (const auto& c : cfs)
            rows.push_back({fdl::format_full(c.k.norm()), fdl::format_full(std::abs(c.cf)),
                            fdl::format_full(c.cf.real()), fdl::format_full(c.cf.imag()),
                            fdl::format_full(c.se_abs)});
        fdl::write_csv(dir + "/cf_t" + std::to_string(s) + ".csv",
                       {"k", "abs_cf", "re_cf", "im_cf", "se_abs"}, rows);
        // quantiles of |x|
        std::vector<double> r(e.n);
        for (std::size_t i = 0; i < e.n; ++i) r[i] = e.radius(i);
        std::sort(r.begin(), r.end());
        nlohmann::json jq;
        for (double q : {0.25, 0.5, 0.75, 0.9}) {
            jq[fdl::format_full(q)] = r[static_cast<std::size_t>(q * (e.n - 1))];
        }
        summary["snapshots"][s]["time"] = e.time;
        summary["snapshots"][s]["quantiles"] = jq;
        if (dump_positions) {
            std::vector<std::vector<std::string>> prow;
            for (std::size_t i = 0; i < e.n; ++i)
                prow.push_back({fdl::format_full(e.position(i, 0))});
            fdl::write_csv(dir + "/positions_t" + std::to_string(s) + ".csv", {"x"}, prow);
        }
    }
    if (sim.snapshots.size() >= 4) {
        try {
            const auto disp = fdl::displacement_scaling(sim.snapshots, 0.5);
            summary["displacement_slope"] = disp.slope;
        } catch (const fdl::Error&) {
            // non-geometric snapshot grids have no slope
        }
    }
    std::ofstream js(dir + "/mc_summary.json");
    js << summary.dump(2) << "\n";
    std::printf("%s\n", summary.dump(2).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anomalous (fractional) diffusion limits of linear kinetic equations"};
    app.require_subcommand(1);
    GlobalArgs g;
    app.add_option("--config", g.config_path, "experiment config file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "RNG seed override");
    app.add_option("--threads", g.threads, "worker threads (default: FDL_THREADS or all cores)");

    auto* c_classify = app.add_subcommand("classify", "classify (alpha, beta, ell) into a regime");
    double alpha = 1.0, beta = 0.0, ell_param = 1.0;
    std::string ell_kind = "constant";
    c_classify->add_option("--alpha", alpha)->required();
    c_classify->add_option("--beta", beta)->required();
    c_classify->add_option("--ell", ell_kind, "constant | power-of-log | iterated-log");
    c_classify->add_option("--ell-param", ell_param);

    auto* c_kappa = app.add_subcommand("kappa", "limit diffusion coefficient for a config");
    auto* c_sweep_sym = app.add_subcommand("symbol-sweep", "symbol over an (eps, k, p) grid");
    std::string sweep_p, sweep_k, sweep_eps;
    c_sweep_sym->add_option("--p", sweep_p, "comma list of Laplace variables");
    c_sweep_sym->add_option("--k", sweep_k, "comma list of wavenumbers");
    c_sweep_sym->add_option("--eps-grid", sweep_eps, "comma list of eps values");

    auto* c_solve = app.add_subcommand("solve", "kinetic / limit equation solves");
    std::string equation = "kinetic";
    bool compare = false;
    c_solve->add_option("--equation", equation, "kinetic | frac | heat");
    c_solve->add_flag("--compare", compare, "co-run the limit equation and report the distance");

    auto* c_mc = app.add_subcommand("mc", "velocity-jump Monte Carlo");
    std::string snapshots_arg;
    bool dump_positions = false;
    c_mc->add_option("--snapshots", snapshots_arg, "comma list of snapshot times");
    c_mc->add_flag("--positions", dump_positions, "write per-particle positions");

    auto* c_sweep = app.add_subcommand("sweep", "run the configured sweep axes");
    auto* c_accept = app.add_subcommand("accept", "run the acceptance suite");
    double kappa_scale = 1.0;
    c_accept->add_option("--kappa-scale", kappa_scale,
                         "perturb kappa in the comparison criteria (sensitivity check)");
    std::vector<std::string> only;
    c_accept->add_option("--only", only, "run only these criteria (e.g. A1 A3)");

    CLI11_PARSE(app, argc, argv);
    if (g.threads > 0) fdl::set_thread_count(g.threads);

    try {
        if (c_classify->parsed()) return cmd_classify(alpha, beta, ell_kind, ell_param);
        fdl::Config cfg = load_config(g);
        if (c_kappa->parsed()) return cmd_kappa(cfg);
        if (c_sweep_sym->parsed()) {
            if (!sweep_p.empty()) cfg.set("sweep.p", sweep_p);
            if (!sweep_k.empty()) cfg.set("sweep.k", sweep_k);
            if (!sweep_eps.empty()) cfg.set("sweep.eps", sweep_eps);
            return cmd_symbol_sweep(cfg);
        }
        if (c_solve->parsed()) return cmd_solve(cfg, equation, compare);
        if (c_mc->parsed()) return cmd_mc(cfg, snapshots_arg, dump_positions);
        if (c_sweep->parsed()) return cmd_symbol_sweep(cfg);
        if (c_accept->parsed()) {
            fdl::AcceptanceOptions opt;
            opt.kappa_scale = kappa_scale;
            opt.out_dir = g.out_dir;
            opt.only = only;
            const fdl::AcceptanceReport rep = fdl::run_acceptance(opt);
            return rep.all_pass ? kExitOk : kExitCellFailure;
        }
    } catch (const fdl::InvalidInput& ex) {
        std::fprintf(stderr, "invalid config: %s\n", ex.what());
        return kExitInvalidConfig;
    } catch (const fdl::UnsupportedRegime& ex) {
        std::fprintf(stderr, "invalid config: %s\n", ex.what());
        return kExitInvalidConfig;
    } catch (const std::exception& ex) {
        std::fprintf(stderr, "error: %s\n", ex.what());
        return kExitCellFailure;
    }
    return kExitOk;
}
