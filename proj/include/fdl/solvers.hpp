// Deterministic solvers: the rescaled kinetic equation advanced per spatial
// Fourier mode on a velocity grid, and the limiting fractional / classical
// diffusion equations as exact per-mode multipliers on the same mode set.
#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "fdl/collision.hpp"
#include "fdl/scaling.hpp"

namespace fdl {

// Fourier modes of a periodic box [0, L)^dim; coefficients follow
// rho(x) = sum_m rho_m exp(i k_m . x).
struct ModeSet {
    double box_length = 1.0;
    int modes_per_axis = 1;
    int dim = 1;

    std::size_t size() const {
        std::size_t n = 1;
        for (int d = 0; d < dim; ++d) n *= static_cast<std::size_t>(modes_per_axis);
        return n;
    }
    Vec wavevector(std::size_t flat) const;
    // index of the mode with opposite wave vector
    std::size_t conjugate_index(std::size_t flat) const;

    bool operator==(const ModeSet& o) const {
        return box_length == o.box_length && modes_per_axis == o.modes_per_axis && dim == o.dim;
    }
};

struct DensityField {
    ModeSet modes;
    std::vector<std::complex<double>> amplitudes;
    double time = 0.0;
    std::string source;  // which equation produced it

    double mass() const;  // box integral of rho = L^dim * amplitude of k = 0
    // evaluate rho(x) by direct Fourier summation (1-D)
    double eval1d(double x) const;
};

struct PhaseSpaceField {
    ModeSet modes;
    std::shared_ptr<const VelocityGrid> grid;
    // values(node, mode)
    Eigen::ArrayXXcd values;
    double time = 0.0;
    double eps = 0.0;

    std::complex<double> mode_density(std::size_t m, const Eigen::ArrayXd& weights) const;
};

// rho_hat(k) for a periodized Gaussian bump of width sigma centred in the box
// with unit mass.
DensityField gaussian_density(const ModeSet& modes, double sigma);

// f = rho(x) F(v): the well-prepared initial datum.
PhaseSpaceField well_prepared_field(const DensityField& rho0, const CollisionKernel& kernel,
                                    double eps);

struct KineticSnapshot {
    double time = 0.0;
    DensityField rho;
    double weighted_norm = 0.0;  // sum_k integral |f|^2 / F dv
    double g_norm_nu = 0.0;      // sum_k integral |f - rho F|^2 nu / F dv
};

struct KineticResult {
    std::vector<KineticSnapshot> snapshots;  // one per requested time (plus T)
    PhaseSpaceField final_field;
    double g_norm_sq_time_integral = 0.0;  // integral over [0,T] of g_norm_nu
    double mass_drift = 0.0;               // max relative drift of total mass
};

// Split-step solve of theta df/dt + eps i(v.k) f = L(f) per mode: exact
// integrating factor for the transport phase, backward-Euler collision phase
// (norm-dissipative for any dt).  Throws InstabilityError if the weighted
// norm of any mode grows by more than 1e-6 in a step.
KineticResult solve_kinetic(const CollisionKernel& kernel, const ScalingRegime& regime,
                            const PhaseSpaceField& f0, double T, double dt,
                            const std::vector<double>& snapshot_times = {});

// rho = integral f dv per mode, and the fluctuation g = f - rho F.
std::pair<DensityField, PhaseSpaceField> decompose(const PhaseSpaceField& field,
                                                   const CollisionKernel& kernel);

// exact multiplier exp(-kappa |k|^gamma T)
DensityField solve_fractional_heat(double kappa, double gamma, const DensityField& rho0, double T);

// exact multiplier exp(-(k . D k) T); D symmetric positive semidefinite
DensityField solve_classical_heat(const Eigen::MatrixXd& D, const DensityField& rho0, double T);

// relative L2 distance between two densities on the same mode set
double relative_l2_distance(const DensityField& a, const DensityField& b);

// fundamental solution of the fractional heat equation on an x grid (1-D),
// by numerical Fourier inversion of exp(-kappa |k|^gamma t)
std::vector<double> stable_profile(double kappa, double gamma, double t,
                                   const std::vector<double>& x_grid);

}  // namespace fdl
