// Collision kernels sigma(v,v') = b(v,v') F(v), the collision frequency nu,
// the scattering operator L = K - nu on a velocity grid, the entropy
// coercivity check, boundedness checks for the kernel integrals, and the
// classical cell problem L(chi) = -vF.
#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fdl/common.hpp"
#include "fdl/equilibrium.hpp"
#include "fdl/velocity_grid.hpp"

namespace fdl {

enum class KernelKind {
    Bgk,        // sigma = F(v): relaxation to equilibrium at unit rate
    Separable,  // b = <v>^beta <v'>^beta
    Shifted,    // b = <v - v'>^beta
    Physical,   // b = |v - v'|^beta
};

struct B3Report {
    double m_observed = 0.0;
    bool pass = false;
    bool diverged = false;
    std::string detail;  // which integral failed and where
};

struct CoercivityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    bool pass = false;
};

struct CellProblemSolution {
    std::vector<Eigen::ArrayXd> chi;  // one grid function per coordinate
    Eigen::MatrixXd D;                // N x N diffusion matrix
    double residual = 0.0;            // max-norm of L(chi) + vF
};

class CollisionKernel {
public:
    struct Options {
        std::optional<double> nu0;   // supplied limit of |v|^-beta nu(v)
        std::optional<double> m_b3;  // supplied bound constant
        bool unchecked = false;      // skip the validity-window check
    };

    CollisionKernel(KernelKind kind, std::shared_ptr<const HeavyTailEquilibrium> eq, double beta,
                    std::shared_ptr<const VelocityGrid> grid = nullptr, Options opt = {});

    static CollisionKernel bgk(std::shared_ptr<const HeavyTailEquilibrium> eq,
                               std::shared_ptr<const VelocityGrid> grid = nullptr);
    static CollisionKernel separable(std::shared_ptr<const HeavyTailEquilibrium> eq, double beta,
                                     std::shared_ptr<const VelocityGrid> grid = nullptr,
                                     Options opt = {});
    static CollisionKernel shifted(std::shared_ptr<const HeavyTailEquilibrium> eq, double beta,
                                   std::shared_ptr<const VelocityGrid> grid = nullptr,
                                   Options opt = {});
    static CollisionKernel physical(std::shared_ptr<const HeavyTailEquilibrium> eq, double beta,
                                    std::shared_ptr<const VelocityGrid> grid = nullptr,
                                    Options opt = {});

    KernelKind kind() const { return kind_; }
    double beta() const { return beta_; }
    const HeavyTailEquilibrium& equilibrium() const { return *eq_; }
    std::shared_ptr<const HeavyTailEquilibrium> equilibrium_ptr() const { return eq_; }
    const VelocityGrid& grid() const;
    std::shared_ptr<const VelocityGrid> grid_ptr() const { return grid_; }
    bool has_grid() const { return grid_ != nullptr; }

    // micro-reversible factor b(v, v') and cross-section sigma(v,v') = b F(v)
    double b(const Vec& v, const Vec& vp) const;
    double sigma(const Vec& v, const Vec& vp) const;

    // collision frequency nu(v) = integral of sigma(v', v) dv', evaluated by
    // definition-level quadrature (analytic tail included)
    double nu(const Vec& v) const;
    double nu_radial(double r) const;
    // interpolated radial nu for use inside other quadratures
    double nu_radial_cached(double r) const;
    // supplied or measured limit of |v|^{-beta} nu(v)
    double nu0() const;

    // ------------------------------------------------------------------
    // Grid-backed operations (require a grid)
    // ------------------------------------------------------------------

    // normalized equilibrium on the grid (sums to exactly 1)
    const Eigen::ArrayXd& F_grid() const;
    // discrete collision frequency; satisfies exact discrete balance
    // K(F) = nu F by construction
    const Eigen::ArrayXd& nu_grid() const;
    // worst relative gap between the discrete nu and the continuum nu
    double balance_rescaling() const;

    // K(f) - nu f on the grid
    Eigen::ArrayXd apply_L(const Eigen::ArrayXd& f) const;
    Eigen::ArrayXd apply_K(const Eigen::ArrayXd& f) const;
    // dense b(v_i, v_j) with the regularized diagonal (shifted/physical)
    const Eigen::MatrixXd& dense_b() const;

    // sup over probes of the two kernel integrals of the boundedness
    // assumption; thm3_mode additionally evaluates the classical-regime
    // integrand nu/b + |v'|^2/nu'.  Probes default to the grid nodes when
    // empty and a grid is present.
    B3Report b3_check(const std::vector<Vec>& probes = {}, bool thm3_mode = false) const;

    bool has_m_b3() const { return m_b3_.has_value(); }
    double m_b3() const;
    void set_m_b3(double m) const { m_b3_ = m; }

    // entropy inequality: integral L(f) f/F dv <= -(1/2M) |f - <f>F|^2 nu/F
    CoercivityReport coercivity_check(const Eigen::ArrayXd& f) const;

    // L(chi) = -vF with <chi> = 0; D = integral v (x) chi dv
    CellProblemSolution solve_cell_problem() const;

private:
    void require_grid() const;
    void build_grid_arrays() const;
    void build_dense_matrix() const;
    double nu_quadrature(double r) const;
    double measure_nu0() const;
    // integral over R of g(v') |b-factor| with the kind's structure (1-D)
    double line_integral(const std::function<double(double)>& smooth, double power_of_dist,
                         double center, double rel_tol) const;

    KernelKind kind_;
    std::shared_ptr<const HeavyTailEquilibrium> eq_;
    double beta_;
    std::shared_ptr<const VelocityGrid> grid_;
    Options opt_;

    // guards all lazy caches below; shared so copies stay consistent
    mutable std::shared_ptr<std::recursive_mutex> mutex_ =
        std::make_shared<std::recursive_mutex>();
    mutable std::optional<double> m_b3_;
    mutable std::optional<double> nu0_measured_;
    mutable std::optional<double> m_beta_;  // separable: integral <v>^beta F

    // lazily built grid data
    mutable std::atomic<bool> grid_built_ = false;
    mutable Eigen::ArrayXd f_grid_, nu_grid_disc_, tilt_grid_;
    mutable std::atomic<bool> dense_built_ = false;
    mutable Eigen::MatrixXd bmat_;  // dense b(v_i, v_j) (1-D shifted/physical)
    mutable std::optional<double> rescaling_;
    // cached radial nu interpolant
    mutable std::atomic<bool> nu_cache_built_ = false;
    mutable std::vector<double> nu_cache_r_, nu_cache_v_;
};

}  // namespace fdl
