// Velocity-space quadrature grids, symmetric under v -> -v so evenness is
// exact on the grid.  1-D grids are Gauss-Legendre panels: a core panel,
// linear panels through the moderate-velocity range and geometric octaves to
// the truncation radius (heavy tails make the far range matter).
#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "fdl/common.hpp"

namespace fdl {

struct GridSpec1D {
    double r_cut = 1.0;        // core boundary (match the equilibrium)
    double r_outer = 1e3;      // truncation radius
    int core_nodes = 16;       // GL order on [0, r_cut]
    int panels = 16;           // linear panels after the core
    double panel_width = 2.0;
    int nodes_per_panel = 10;
    int geo_nodes = 8;         // GL order per geometric octave
};

class VelocityGrid {
public:
    static std::shared_ptr<const VelocityGrid> build_1d(const GridSpec1D& spec);
    // radial-angular product grid; angular nodes come in antipodal pairs
    static std::shared_ptr<const VelocityGrid> build_radial_angular(int dim,
                                                                    const GridSpec1D& radial,
                                                                    int angular_nodes);

    int dim() const { return dim_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<Vec>& nodes() const { return nodes_; }
    const Eigen::ArrayXd& weights() const { return weights_; }
    double r_outer() const { return r_outer_; }

    // index of -v for node i
    std::size_t mirror(std::size_t i) const { return mirror_[i]; }

    double quadrature(const Eigen::ArrayXd& f) const;

    // evaluate a radial function on all nodes
    template <typename Fn>
    Eigen::ArrayXd sample_radial(Fn&& f) const {
        Eigen::ArrayXd out(static_cast<Eigen::Index>(nodes_.size()));
        for (std::size_t i = 0; i < nodes_.size(); ++i)
            out[static_cast<Eigen::Index>(i)] = f(nodes_[i].norm());
        return out;
    }

private:
    int dim_ = 1;
    double r_outer_ = 0.0;
    std::vector<Vec> nodes_;
    Eigen::ArrayXd weights_;
    std::vector<std::size_t> mirror_;
};

}  // namespace fdl
