#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fluorospec/bloch.hpp"
#include "fluorospec/spectrum.hpp"

namespace fluorospec {

/// Discretised Wiener phase: increments are i.i.d. Normal(0, 2 L dt).
struct PhasePath {
    double dt = 0.0;
    std::vector<double> increments;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Reproducible increment source keyed by (seed, stream). Monte Carlo
/// realization r draws from stream r, so results do not depend on how
/// realizations are distributed over workers.
///
/// With refinement k the Wiener path is drawn on a grid of step dt * 2^k and
/// each coarse increment is split into 2^k pieces by Brownian bridges. A
/// source at (dt / 2, k + 1) therefore produces the same path as (dt, k),
/// sampled twice as finely.
class PhaseNoise {
public:
    PhaseNoise(double linewidth, double dt, std::uint64_t seed, std::uint64_t stream,
               unsigned refinement = 0);

    double next();

private:
    void refill();

    // one generator per bridge level so coarser levels see the same draws
    std::vector<std::mt19937_64> engines_;
    std::vector<std::normal_distribution<double>> normals_;
    double variance_;  ///< 2 L dt for one fine step
    std::vector<double> block_;
    std::size_t cursor_ = 0;
};

PhasePath simulate_phase_path(double linewidth, double dt, std::size_t steps, std::uint64_t seed,
                              std::uint64_t stream = 0);

template <class T>
struct EnsembleEstimate {
    T mean{};
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Mean and standard error of the mean, reduced pairwise in index order.
EnsembleEstimate<double> estimate(std::span<const double> samples);
EnsembleEstimate<cplx> estimate(std::span<const cplx> samples);

inline constexpr std::size_t kMinRealizations = 100;

struct McTrajectoryOptions {
    double dt = 1e-4;
    double t_end = 2.0;
    std::size_t realizations = 2000;
    std::uint64_t seed = 1;
    std::size_t samples = 20;  ///< sampled times are t_end * k / samples, k = 0..samples
    unsigned noise_refinement = 0;  ///< see PhaseNoise
    BlochState initial{};
};

struct McTrajectory {
    std::vector<double> times;
    /// Phase-rotated coherence e^{i phi(t)} <sigma_->, comparable with the averaged equations.
    std::vector<EnsembleEstimate<cplx>> sigma_minus;
    std::vector<EnsembleEstimate<double>> sigma_z;
};

/// Ensemble of Bloch trajectories driven by a laser with a sampled Wiener
/// phase: RK4 in the deterministic part with the phase frozen at its step
/// midpoint. Rejects n < 100 and steps coarser than the stability guard or
/// 0.01 / L.
McTrajectory mc_average_trajectory(const DriveParams& params, const McTrajectoryOptions& options);

struct McSpectrumOptions {
    double dt = 1e-4;
    double t_relax = 1.0;
    double tau_max = 1.0;
    std::size_t realizations = 5000;
    std::uint64_t seed = 1;
    std::size_t batches = 20;  ///< batch means give the per-point standard errors
    unsigned noise_refinement = 0;
};

/// Stationary spectrum estimated from per-realization regression of the
/// phase-rotated correlation. Coarse validation tool: statistical errors are
/// reported in Spectrum::stderrs.
Spectrum mc_steady_spectrum(const DriveParams& params, std::span<const double> omegas,
                            const McSpectrumOptions& options);

}  // namespace fluorospec
