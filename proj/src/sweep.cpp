#include "fdl/sweep.hpp"

#include <chrono>
#include <cmath>

namespace fdl {

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

SweepResult run_sweep(const Config& cfg_in) {
    const Config cfg = with_defaults(cfg_in);
    auto eq = make_equilibrium(cfg);
    auto kernel = make_kernel(cfg, eq, nullptr);
    const ScalingRegime regime = make_regime(cfg, *eq, *kernel);

    const std::vector<double> eps_axis = cfg.get_list("sweep.eps", {0.1});
    const std::vector<double> k_axis = cfg.get_list("sweep.k", {1.0});
    const std::vector<double> p_axis = cfg.get_list("sweep.p", {1.0});
    if (eps_axis.empty() || k_axis.empty() || p_axis.empty())
        throw InvalidInput("sweep: empty axis");

    // limit coefficient for the abs_err column
    KappaValue kv;
    if (regime.kind == RegimeKind::Fractional) {
        kv = kappa_fractional(regime, eq->tail_constant(), kernel->nu0(), eq->dim());
    } else {
        kv = kappa_critical(regime.alpha, regime.beta, eq->tail_constant(), kernel->nu0(),
                            eq->dim());
    }

    struct Cell {
        double eps, k, p;
        SymbolValue sv;
        double limit = 0.0;
        std::string error;
        double wall_ms = 0.0;
    };
    std::vector<Cell> cells;
    for (double p : p_axis)
        for (double k : k_axis)
            for (double e : eps_axis) cells.push_back({e, k, p, {}, 0.0, "", 0.0});

    parallel_for(cells.size(), [&](std::size_t i) {
        Cell& c = cells[i];
        const double t0 = now_ms();
        try {
            const Vec kvec = eq->dim() == 1 ? Vec(c.k)
                                            : (eq->dim() == 2 ? Vec(c.k, 0.0) : Vec(c.k, 0.0, 0.0));
            c.sv = a_eps(*kernel, regime, c.p, kvec, c.eps);
            c.limit = limit_symbol(regime, kv, c.p, kvec);
        } catch (const std::exception& ex) {
            c.error = ex.what();
        }
        c.wall_ms = now_ms() - t0;
    });

    SweepResult out;
    out.csv_header = {"eps", "re_a", "im_a", "drift", "d_eps", "c_remainder", "limit", "abs_err"};
    const std::string hash = hash_hex(cfg.hash());
    for (const Cell& c : cells) {
        ResultRecord rec;
        rec.config_hash = hash;
        rec.module = "symbol";
        rec.operation = "a_eps";
        rec.inputs["eps"] = format_full(c.eps);
        rec.inputs["k"] = format_full(c.k);
        rec.inputs["p"] = format_full(c.p);
        rec.wall_ms = c.wall_ms;
        if (!c.error.empty()) {
            rec.error = c.error;
            ++out.failed_cells;
        } else {
            rec.outputs["re_a"] = format_full(c.sv.a_eps.real());
            rec.outputs["im_a"] = format_full(c.sv.a_eps.imag());
            rec.outputs["drift"] = format_full(c.sv.drift_part);
            rec.outputs["d_eps"] = format_full(c.sv.d_eps);
            rec.outputs["c_remainder"] = format_full(c.sv.c_remainder);
            rec.outputs["limit"] = format_full(c.limit);
            rec.outputs["abs_err"] = format_full(std::abs(c.sv.a_eps.real() - c.limit));
            out.csv_rows.push_back({format_full(c.eps), format_full(c.sv.a_eps.real()),
                                    format_full(c.sv.a_eps.imag()), format_full(c.sv.drift_part),
                                    format_full(c.sv.d_eps), format_full(c.sv.c_remainder),
                                    format_full(c.limit),
                                    format_full(std::abs(c.sv.a_eps.real() - c.limit))});
        }
        out.records.push_back(std::move(rec));
    }

    const std::string dir = cfg.get_string("output.dir", ".");
    if (!dir.empty()) {
        write_csv(dir + "/sweep.csv", out.csv_header, out.csv_rows);
        RecordSink sink(dir + "/records.jsonl");
        for (const auto& r : out.records) sink.append(r);
    }
    return out;
}

}  // namespace fdl
