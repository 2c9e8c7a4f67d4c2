#include "fdl/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fdl {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidInput("config: line " + std::to_string(lineno) + " has no '='");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidInput("config: empty key at line " + std::to_string(lineno));
        cfg.kv_[key] = val;
    }
    return cfg;
}

void Config::set_double(const std::string& key, double v) { kv_[key] = format_double(v); }
void Config::set_int(const std::string& key, long v) { kv_[key] = std::to_string(v); }

std::string Config::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

std::string Config::require_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw InvalidInput("config: missing required key '" + key + "'");
    return it->second;
}

double Config::get_double(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw InvalidInput("config: key '" + key + "' is not a number: " + it->second);
    }
}

double Config::require_double(const std::string& key) const {
    if (!has(key)) throw InvalidInput("config: missing required key '" + key + "'");
    return get_double(key, 0.0);
}

long Config::get_int(const std::string& key, long dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    try {
        std::size_t pos = 0;
        const long v = std::stol(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw InvalidInput("config: key '" + key + "' is not an integer: " + it->second);
    }
}

bool Config::get_bool(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw InvalidInput("config: key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::get_list(const std::string& key,
                                     const std::vector<double>& dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    std::vector<double> out;
    std::istringstream in(it->second);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw InvalidInput("config: key '" + key + "' has a bad list element: " + tok);
        }
    }
    return out;
}

std::string Config::serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << " = " << v << "\n";
    return os.str();
}

uint64_t Config::hash() const {
    const std::string s = serialize();
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

SlowlyVarying make_ell(const Config& cfg, const std::string& prefix) {
    const std::string kind = cfg.get_string(prefix + "kind", "constant");
    if (kind == "constant") return SlowlyVarying::constant(cfg.get_double(prefix + "param", 1.0));
    if (kind == "power-of-log")
        return SlowlyVarying::power_of_log(cfg.get_double(prefix + "param", 1.0));
    if (kind == "iterated-log") return SlowlyVarying::iterated_log();
    throw InvalidInput("config: unknown slowly varying kind '" + kind +
                       "' (tabulated ell is built programmatically)");
}

std::shared_ptr<const HeavyTailEquilibrium> make_equilibrium(const Config& cfg) {
    const int dim = static_cast<int>(cfg.get_int("equilibrium.dim", 1));
    const double alpha = cfg.require_double("equilibrium.alpha");
    const double r_cut = cfg.get_double("equilibrium.r_cut", 1.0);
    const std::string core = cfg.get_string("equilibrium.core", "uniform");
    SlowlyVarying ell = make_ell(cfg);
    if (cfg.get_bool("equilibrium.gaussian_bulk", false))
        return std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::gaussian_bulk(dim, alpha, r_cut));
    const double kappa0 = cfg.get_double("equilibrium.kappa0", 1.0);
    if (core == "uniform")
        return std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::uniform_core(dim, alpha, kappa0, r_cut, std::move(ell)));
    if (core == "maxwellian")
        return std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::maxwellian_core(dim, alpha, kappa0, r_cut, std::move(ell)));
    if (core == "smooth")
        return std::make_shared<HeavyTailEquilibrium>(
            HeavyTailEquilibrium::smooth_profile(dim, alpha, kappa0, std::move(ell)));
    throw InvalidInput("config: unknown equilibrium.core '" + core + "'");
}

std::shared_ptr<const VelocityGrid> make_grid(const Config& cfg, const HeavyTailEquilibrium& eq) {
    GridSpec1D spec;
    spec.r_cut = eq.r_cut();
    spec.r_outer = cfg.get_double("grid.r_cut_outer", 1e3);
    spec.panels = static_cast<int>(cfg.get_int("grid.panels", 16));
    spec.nodes_per_panel = static_cast<int>(cfg.get_int("grid.nodes_per_panel", 10));
    spec.core_nodes = static_cast<int>(cfg.get_int("grid.core_nodes", 16));
    spec.panel_width = cfg.get_double("grid.panel_width", 2.0);
    spec.geo_nodes = static_cast<int>(cfg.get_int("grid.geo_nodes", 8));
    if (eq.dim() == 1) return VelocityGrid::build_1d(spec);
    return VelocityGrid::build_radial_angular(
        eq.dim(), spec, static_cast<int>(cfg.get_int("grid.angular_nodes", 16)));
}

std::shared_ptr<const CollisionKernel> make_kernel(const Config& cfg,
                                                   std::shared_ptr<const HeavyTailEquilibrium> eq,
                                                   std::shared_ptr<const VelocityGrid> grid) {
    const std::string kind = cfg.get_string("kernel.kind", "bgk");
    CollisionKernel::Options opt;
    if (cfg.has("kernel.nu0")) opt.nu0 = cfg.require_double("kernel.nu0");
    opt.unchecked = cfg.get_bool("kernel.unchecked", false);
    const double beta = cfg.get_double("kernel.beta", 0.0);
    if (kind == "bgk")
        return std::make_shared<CollisionKernel>(CollisionKernel::bgk(std::move(eq), std::move(grid)));
    if (kind == "separable")
        return std::make_shared<CollisionKernel>(
            CollisionKernel::separable(std::move(eq), beta, std::move(grid), opt));
    if (kind == "shifted")
        return std::make_shared<CollisionKernel>(
            CollisionKernel::shifted(std::move(eq), beta, std::move(grid), opt));
    if (kind == "physical")
        return std::make_shared<CollisionKernel>(
            CollisionKernel::physical(std::move(eq), beta, std::move(grid), opt));
    throw InvalidInput("config: unknown kernel.kind '" + kind + "'");
}

ScalingRegime make_regime(const Config& cfg, const HeavyTailEquilibrium& eq,
                          const CollisionKernel& kernel) {
    const double alpha = cfg.get_double("regime.alpha", eq.alpha());
    const double beta = cfg.get_double("regime.beta", kernel.beta());
    return classify(alpha, beta, eq.ell());
}

Config with_defaults(const Config& cfg) {
    Config full = cfg;
    auto put = [&](const std::string& k, const std::string& v) {
        if (!full.has(k)) full.set(k, v);
    };
    put("equilibrium.dim", "1");
    put("equilibrium.kappa0", "1");
    put("equilibrium.r_cut", "1");
    put("equilibrium.core", "uniform");
    put("equilibrium.ell.kind", "constant");
    put("equilibrium.ell.param", "1");
    put("equilibrium.gaussian_bulk", "false");
    put("kernel.kind", "bgk");
    put("kernel.beta", "0");
    put("kernel.unchecked", "false");
    put("grid.r_cut_outer", "1000");
    put("grid.panels", "16");
    put("grid.nodes_per_panel", "10");
    put("grid.core_nodes", "16");
    put("grid.panel_width", "2");
    put("grid.geo_nodes", "8");
    put("solver.box_length", "40");
    put("solver.modes", "256");
    put("solver.dt", "0.00048828125");
    put("solver.T", "1");
    put("solver.sigma", "1");
    put("mc.particles", "100000");
    put("mc.seed", "1");
    put("output.dir", ".");
    return full;
}

}  // namespace fdl
