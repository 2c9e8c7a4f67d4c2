// Experiment configuration: a flat tree of dotted keys and values in a plain
// text file ("key = value" lines, '#' comments).  Parsing, serialization and
// hashing round-trip exactly; builders turn a config into library objects.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fdl/collision.hpp"
#include "fdl/equilibrium.hpp"
#include "fdl/scaling.hpp"
#include "fdl/velocity_grid.hpp"

namespace fdl {

class Config {
public:
    Config() = default;
    static Config parse_file(const std::string& path);
    static Config parse_text(const std::string& text);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void set_double(const std::string& key, double v);
    void set_int(const std::string& key, long v);

    std::string get_string(const std::string& key, const std::string& dflt) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double dflt) const;
    double require_double(const std::string& key) const;
    long get_int(const std::string& key, long dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& dflt = {}) const;

    // canonical (sorted-key) text form; parse(serialize(c)) == c
    std::string serialize() const;
    // FNV-1a over the canonical form
    uint64_t hash() const;

    const std::map<std::string, std::string>& items() const { return kv_; }

private:
    std::map<std::string, std::string> kv_;
};

// Builders for the standard config keys.
//   equilibrium.{dim, alpha, kappa0, r_cut, core, tail_exact, gaussian_bulk}
//   equilibrium.ell.{kind, param}
//   kernel.{kind, beta, nu0}
//   grid.{r_cut_outer, panels, nodes_per_panel, core_nodes, panel_width,
//         geo_nodes, angular_nodes}
std::shared_ptr<const HeavyTailEquilibrium> make_equilibrium(const Config& cfg);
SlowlyVarying make_ell(const Config& cfg, const std::string& prefix = "equilibrium.ell.");
std::shared_ptr<const VelocityGrid> make_grid(const Config& cfg,
                                              const HeavyTailEquilibrium& eq);
std::shared_ptr<const CollisionKernel> make_kernel(const Config& cfg,
                                                   std::shared_ptr<const HeavyTailEquilibrium> eq,
                                                   std::shared_ptr<const VelocityGrid> grid);
// classify from the resolved (alpha, beta, ell); validates against the
// theorem hypotheses and throws with the violated inequality named
ScalingRegime make_regime(const Config& cfg, const HeavyTailEquilibrium& eq,
                          const CollisionKernel& kernel);

// config with every default written out (self-describing records)
Config with_defaults(const Config& cfg);

}  // namespace fdl
