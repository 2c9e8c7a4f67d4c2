// Velocity-jump process read off the rescaled kinetic equation: exponential
// clocks at rate nu(v)/theta, free flight at speed (eps/theta) v, post-jump
// velocity law sigma(v', v)/nu(v).  Particles are independent; every draw
// comes from a per-particle counter-based stream, so ensembles are
// bit-reproducible for any worker count.
#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "fdl/collision.hpp"
#include "fdl/scaling.hpp"

namespace fdl {

struct JumpProcessParams {
    std::shared_ptr<const CollisionKernel> kernel;
    ScalingRegime regime;
    double eps = 0.1;
    double horizon = 1.0;
    std::size_t n_particles = 1000;
    uint64_t seed = 0;
    std::vector<double> snapshot_times;  // ascending; horizon appended if absent
    // initial spatial law: point mass at the origin, or a Gaussian of this
    // width centred at origin_x (to match a box solver's initial density)
    std::optional<double> initial_gaussian_sigma;
    double origin_x = 0.0;
    bool disable_jumps = false;  // free-streaming test mode
};

// One ensemble snapshot; coordinates are flattened (dim * n doubles).
struct ParticleEnsemble {
    int dim = 1;
    double time = 0.0;
    std::size_t n = 0;
    std::vector<double> positions;
    std::vector<double> velocities;

    double position(std::size_t i, int d) const { return positions[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)]; }
    double velocity(std::size_t i, int d) const { return velocities[i * static_cast<std::size_t>(dim) + static_cast<std::size_t>(d)]; }
    double radius(std::size_t i) const;
    double displacement(std::size_t i) const;
};

struct SimulationResult {
    std::vector<ParticleEnsemble> snapshots;  // one per snapshot time
    const ParticleEnsemble& final_ensemble() const { return snapshots.back(); }
};

SimulationResult simulate(const JumpProcessParams& params);

struct CfValue {
    Vec k;
    std::complex<double> cf;
    double se_abs = 0.0;  // jackknife standard error of |cf|
};

// (1/n) sum exp(-i k . x_j) with jackknife standard errors
std::vector<CfValue> empirical_cf(const ParticleEnsemble& ensemble, const std::vector<Vec>& k_list);

struct DisplacementReport {
    std::vector<double> times;
    std::vector<double> quantiles;
    double slope = 0.0;  // log-log slope of the q-quantile of |x| against t
};

// Requires >= 4 geometric snapshot times; throws StatisticsError when the
// quantile estimate is too noisy (relative SE above 10%).
DisplacementReport displacement_scaling(const std::vector<ParticleEnsemble>& snapshots, double q);

}  // namespace fdl
