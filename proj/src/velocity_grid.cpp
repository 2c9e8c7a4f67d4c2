#include "fdl/velocity_grid.hpp"

#include <cmath>

#include "fdl/quadrature.hpp"

namespace fdl {

namespace {

// positive half-line panel nodes for the 1-D layout
void half_line(const GridSpec1D& s, std::vector<double>& x, std::vector<double>& w) {
    if (!(s.r_cut > 0.0) || !(s.r_outer > s.r_cut))
        throw InvalidInput("velocity grid: need 0 < r_cut < r_outer");
    gl_panel(0.0, s.r_cut, s.core_nodes, x, w);
    double lo = s.r_cut;
    for (int i = 0; i < s.panels && lo < s.r_outer; ++i) {
        const double hi = std::min(lo + s.panel_width, s.r_outer);
        gl_panel(lo, hi, s.nodes_per_panel, x, w);
        lo = hi;
    }
    while (lo < s.r_outer) {
        const double hi = std::min(2.0 * lo, s.r_outer);
        gl_panel(lo, hi, s.geo_nodes, x, w);
        lo = hi;
    }
}

}  // namespace

std::shared_ptr<const VelocityGrid> VelocityGrid::build_1d(const GridSpec1D& spec) {
    std::vector<double> x, w;
    half_line(spec, x, w);
    auto g = std::make_shared<VelocityGrid>();
    g->dim_ = 1;
    g->r_outer_ = spec.r_outer;
    const std::size_t m = x.size();
    g->nodes_.resize(2 * m);
    g->weights_.resize(static_cast<Eigen::Index>(2 * m));
    g->mirror_.resize(2 * m);
    for (std::size_t i = 0; i < m; ++i) {
        // ascending order: negatives reversed, then positives
        g->nodes_[m - 1 - i] = Vec(-x[i]);
        g->weights_[static_cast<Eigen::Index>(m - 1 - i)] = w[i];
        g->nodes_[m + i] = Vec(x[i]);
        g->weights_[static_cast<Eigen::Index>(m + i)] = w[i];
    }
    for (std::size_t i = 0; i < 2 * m; ++i) g->mirror_[i] = 2 * m - 1 - i;
    return g;
}

std::shared_ptr<const VelocityGrid> VelocityGrid::build_radial_angular(int dim,
                                                                       const GridSpec1D& radial,
                                                                       int angular_nodes) {
    if (dim == 1) return build_1d(radial);
    if (dim != 2 && dim != 3) throw InvalidInput("velocity grid: dim must be 1, 2 or 3");
    if (angular_nodes < 2 || angular_nodes % 2 != 0)
        throw InvalidInput("velocity grid: angular node count must be even and >= 2");
    std::vector<double> r, wr;
    half_line(radial, r, wr);

    auto g = std::make_shared<VelocityGrid>();
    g->dim_ = dim;
    g->r_outer_ = radial.r_outer;

    struct Dir {
        Vec u;
        double w;
    };
    std::vector<Dir> dirs;
    if (dim == 2) {
        // uniform angles (trapezoid rule is exact for trigonometric precision)
        const int na = angular_nodes;
        for (int a = 0; a < na; ++a) {
            const double th = 2.0 * M_PI * (a + 0.5) / na;
            dirs.push_back({Vec(std::cos(th), std::sin(th)), 2.0 * M_PI / na});
        }
    } else {
        // product rule: GL in cos(theta) x uniform phi
        const int nc = angular_nodes / 2;
        const int np = angular_nodes;
        const GaussLegendre& gl = gauss_legendre(nc);
        for (int ic = 0; ic < nc; ++ic) {
            const double c = gl.nodes[static_cast<size_t>(ic)];
            const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
            for (int ip = 0; ip < np; ++ip) {
                const double ph = 2.0 * M_PI * (ip + 0.5) / np;
                dirs.push_back({Vec(sn * std::cos(ph), sn * std::sin(ph), c),
                                gl.weights[static_cast<size_t>(ic)] * 2.0 * M_PI / np});
            }
        }
    }

    const std::size_t nr = r.size(), nd = dirs.size();
    g->nodes_.resize(nr * nd);
    g->weights_.resize(static_cast<Eigen::Index>(nr * nd));
    for (std::size_t i = 0; i < nr; ++i) {
        for (std::size_t a = 0; a < nd; ++a) {
            Vec v = dirs[a].u;
            for (int d = 0; d < dim; ++d) v[d] *= r[i];
            v.dim = dim;
            g->nodes_[i * nd + a] = v;
            g->weights_[static_cast<Eigen::Index>(i * nd + a)] =
                wr[i] * std::pow(r[i], dim - 1) * dirs[a].w;
        }
    }
    // antipodal pairing: directions were laid out so that -u is also a node
    g->mirror_.assign(nr * nd, 0);
    for (std::size_t i = 0; i < nr * nd; ++i) {
        const Vec m = -g->nodes_[i];
        std::size_t found = nr * nd;
        for (std::size_t j = 0; j < nr * nd; ++j) {
            if ((g->nodes_[j] - m).norm() < 1e-12 * (1.0 + m.norm())) {
                found = j;
                break;
            }
        }
        if (found == nr * nd) throw NumericalFailure("velocity grid: node set is not symmetric");
        g->mirror_[i] = found;
    }
    return g;
}

double VelocityGrid::quadrature(const Eigen::ArrayXd& f) const {
    if (static_cast<std::size_t>(f.size()) != nodes_.size())
        throw InvalidInput("quadrature: grid function has wrong length");
    // deterministic pairwise reduction
    std::vector<double> terms(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        terms[i] = weights_[static_cast<Eigen::Index>(i)] * f[static_cast<Eigen::Index>(i)];
    return pairwise_sum(terms);
}

}  // namespace fdl
