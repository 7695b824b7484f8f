#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include "fluorospec/bloch.hpp"
#include "fluorospec/error.hpp"
#include "fluorospec/features.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/stochastic.hpp"
#include "test_support.hpp"

using namespace fluorospec;

namespace {

std::vector<double> coarse_grid(double half, std::size_t points) { return FrequencyGrid{-half, half, points}.values(); }

bool same_bits(const McTrajectory& a, const McTrajectory& b) {
    if (a.times != b.times) return false;
    for (std::size_t k = 0; k < a.times.size(); ++k) {
        if (a.sigma_minus[k].mean != b.sigma_minus[k].mean) return false;
        if (a.sigma_minus[k].std_error != b.sigma_minus[k].std_error) return false;
        if (a.sigma_z[k].mean != b.sigma_z[k].mean) return false;
    }
    return true;
}

}  // namespace

TEST(PhasePath, NoLinewidthMeansNoNoise) {
    const auto path = simulate_phase_path(0.0, 1e-3, 1000, 42);
    for (double inc : path.increments) EXPECT_EQ(inc, 0.0);
}

TEST(PhasePath, SeedDeterminesPath) {
    const auto a = simulate_phase_path(100.0, 1e-4, 5000, 7);
    const auto b = simulate_phase_path(100.0, 1e-4, 5000, 7);
    const auto c = simulate_phase_path(100.0, 1e-4, 5000, 8);
    const auto d = simulate_phase_path(100.0, 1e-4, 5000, 7, 1);
    EXPECT_EQ(a.increments, b.increments);
    EXPECT_NE(a.increments, c.increments);
    EXPECT_NE(a.increments, d.increments);
    EXPECT_EQ(a.seed, 7u);
}

TEST(PhasePath, VarianceRecoversLinewidth) {
    const double dt = 1e-4;
    const std::size_t n = 1000000;
    const auto path = simulate_phase_path(100.0, dt, n, 2024);
    std::vector<double> scaled(n);
    for (std::size_t k = 0; k < n; ++k) scaled[k] = path.increments[k] * path.increments[k] / (2.0 * dt);
    const auto est = estimate(std::span<const double>(scaled));
    EXPECT_NEAR(est.mean, 100.0, 4.0 * est.std_error);
}

TEST(PhasePath, IncrementsAreSeriallyUncorrelated) {
    const std::size_t n = 200000;
    const auto path = simulate_phase_path(30.0, 1e-4, n, 99);
    double c0 = 0.0;
    double c1 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        c0 += path.increments[k] * path.increments[k];
        if (k + 1 < n) c1 += path.increments[k] * path.increments[k + 1];
    }
    EXPECT_LT(std::abs(c1 / c0), 4.0 / std::sqrt(static_cast<double>(n)));
}

TEST(PhasePath, RejectsBadArguments) {
    EXPECT_THROW(simulate_phase_path(1.0, 0.0, 10, 1), Error);
    EXPECT_THROW(simulate_phase_path(1.0, 1e-3, 0, 1), Error);
    EXPECT_THROW(simulate_phase_path(-1.0, 1e-3, 10, 1), Error);
}

TEST(PhaseNoise, BridgeRefinementSharesTheCoarsePath) {
    PhaseNoise coarse(40.0, 2e-4, 5, 3, 2);
    PhaseNoise fine(40.0, 1e-4, 5, 3, 3);
    for (int k = 0; k < 1000; ++k) {
        const double a = coarse.next();
        const double b = fine.next() + fine.next();
        EXPECT_NEAR(a, b, 1e-15);
    }
}

TEST(PhaseNoise, BridgeRefinementPreservesVariance) {
    PhaseNoise noise(25.0, 1e-3, 11, 0, 4);
    std::vector<double> sq(200000);
    for (auto& v : sq) {
        const double x = noise.next();
        v = x * x / (2.0 * 1e-3);
    }
    const auto est = estimate(std::span<const double>(sq));
    EXPECT_NEAR(est.mean, 25.0, 4.0 * est.std_error);
}

TEST(EnsembleEstimate, StandardErrorScalesAsInverseRoot) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> normal(0.0, 2.0);
    std::vector<double> samples(8000);
    for (auto& x : samples) x = normal(rng);
    const auto half = estimate(std::span<const double>(samples.data(), 4000));
    const auto full = estimate(std::span<const double>(samples));
    EXPECT_GT(half.std_error, 0.0);
    EXPECT_NEAR(half.std_error / full.std_error, std::sqrt(2.0), 0.3 * std::sqrt(2.0));
    EXPECT_EQ(full.n, 8000u);
    const std::vector<double> single{3.0};
    EXPECT_EQ(estimate(std::span<const double>(single)).std_error, 0.0);
}

TEST(McTrajectory, RejectsTooFewRealizations) {
    McTrajectoryOptions opt;
    opt.realizations = 99;
    try {
        mc_average_trajectory({1.0, 5.0, 0.0, 1.0}, opt);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::too_few_realizations);
    }
}

TEST(McTrajectory, RejectsUnresolvedNoise) {
    McTrajectoryOptions opt;
    opt.dt = 1e-3;
    opt.realizations = 100;
    try {
        mc_average_trajectory({1.0, 5.0, 0.0, 50.0}, opt);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::step_too_coarse);
    }
}

TEST(McTrajectory, NoiselessEnsembleEqualsDeterministicEvolution) {
    const DriveParams p{1.0, 20.0, 5.0, 0.0};
    McTrajectoryOptions opt;
    opt.dt = 1e-3;
    opt.t_end = 1.0;
    opt.realizations = 100;
    opt.samples = 10;
    const auto mc = mc_average_trajectory(p, opt);
    const auto det = evolve(BlochState{}, p, 1.0, 1e-3, 100);
    ASSERT_EQ(mc.times.size(), det.times.size());
    for (std::size_t k = 0; k < mc.times.size(); ++k) {
        EXPECT_NEAR(mc.sigma_z[k].mean, det.states[k].sigma_z, 1e-12);
        EXPECT_LT(std::abs(mc.sigma_minus[k].mean - det.states[k].sigma_minus), 1e-12);
        EXPECT_LT(mc.sigma_z[k].std_error, 1e-14);
    }
}

TEST(McTrajectory, AveragesToPhaseDiffusedBlochEquations) {
    const DriveParams p{1.0, 50.0, 0.0, 50.0};
    McTrajectoryOptions opt;  // n = 2000, dt = 1e-4, t_end = 2, 20 samples
    const auto mc = mc_average_trajectory(p, opt);
    const auto det = evolve(BlochState{}, p, opt.t_end, opt.dt, 1000);
    ASSERT_EQ(mc.times.size(), 21u);
    for (std::size_t k = 1; k < mc.times.size(); ++k) {
        EXPECT_NEAR(mc.sigma_z[k].mean, det.states[k].sigma_z, 3.0 * mc.sigma_z[k].std_error) << mc.times[k];
    }
    EXPECT_NEAR(mc.sigma_z.back().mean, steady_state(p).sigma_z, 3.0 * mc.sigma_z.back().std_error);
}

TEST(McTrajectory, SeedDeterminismAcrossWorkerCounts) {
    const DriveParams p{1.0, 30.0, 10.0, 40.0};
    McTrajectoryOptions opt;
    opt.t_end = 0.2;
    opt.realizations = 150;
    opt.seed = 77;
    setenv("FLUOROSPEC_THREADS", "1", 1);
    const auto a = mc_average_trajectory(p, opt);
    setenv("FLUOROSPEC_THREADS", "4", 1);
    const auto b = mc_average_trajectory(p, opt);
    unsetenv("FLUOROSPEC_THREADS");
    EXPECT_TRUE(same_bits(a, b));
    opt.seed = 78;
    EXPECT_FALSE(same_bits(a, mc_average_trajectory(p, opt)));
}

TEST(McTrajectory, HalvingStepMovesMeansByLessThanOneStandardError) {
    const DriveParams p{1.0, 50.0, 0.0, 50.0};
    McTrajectoryOptions opt;
    opt.dt = 2e-4;
    opt.t_end = 0.5;
    opt.realizations = 400;
    opt.samples = 10;
    const auto coarse = mc_average_trajectory(p, opt);
    opt.dt = 1e-4;
    opt.noise_refinement = 1;
    const auto fine = mc_average_trajectory(p, opt);
    for (std::size_t k = 1; k < coarse.times.size(); ++k) {
        EXPECT_LT(std::abs(coarse.sigma_z[k].mean - fine.sigma_z[k].mean), coarse.sigma_z[k].std_error);
        EXPECT_LT(std::abs(coarse.sigma_minus[k].mean - fine.sigma_minus[k].mean), coarse.sigma_minus[k].std_error);
    }
}

TEST(McSpectrum, UndrivenIsZero) {
    McSpectrumOptions opt;
    opt.dt = 1e-3;
    opt.t_relax = 10.0;
    opt.tau_max = 5.0;
    opt.realizations = 100;
    opt.batches = 10;
    const auto s = mc_steady_spectrum({1.0, 0.0, 0.0, 5.0}, coarse_grid(20.0, 41), opt);
    EXPECT_EQ(s.method, Method::monte_carlo);
    for (std::size_t k = 0; k < s.values.size(); ++k) EXPECT_LE(std::abs(s.values[k]), 3.0 * s.stderrs[k] + 1e-15);
}

TEST(McSpectrum, RejectsShortRelaxation) {
    McSpectrumOptions opt;
    opt.t_relax = 0.05;
    opt.realizations = 100;
    try {
        mc_steady_spectrum({1.0, 50.0, 0.0, 100.0}, coarse_grid(100.0, 5), opt);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::insufficient_relaxation);
    }
}

TEST(McSpectrum, BroadLaserHoleAndAgreement) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto omegas = coarse_grid(200.0, 81);
    McSpectrumOptions opt;
    opt.t_relax = 0.3;
    opt.tau_max = 0.3;
    const auto mc = mc_steady_spectrum(p, omegas, opt);
    const auto exact = spectrum_exact(p, omegas);

    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double tol = std::max(0.05 * std::abs(exact.values[k]), 3.0 * mc.stderrs[k]);
        EXPECT_LE(std::abs(mc.values[k] - exact.values[k]), tol) << omegas[k];
    }

    const std::size_t c = omegas.size() / 2;
    for (const auto& e : find_extrema(exact)) {
        if (e.kind != ExtremumKind::max) continue;
        const double combined = std::hypot(mc.stderrs[c], mc.stderrs[e.index]);
        EXPECT_GT(mc.values[e.index] - mc.values[c], 3.0 * combined) << e.omega;
    }
}

TEST(McSpectrum, DetunedAsymmetryHasExactSign) {
    const DriveParams p{1.0, 50.0, 100.0, 200.0};
    const auto omegas = coarse_grid(400.0, 81);
    McSpectrumOptions opt;
    opt.dt = 5e-5;
    opt.t_relax = 1.0;
    opt.tau_max = 0.3;
    opt.realizations = 1000;
    const auto mc = mc_steady_spectrum(p, omegas, opt);
    const double exact = asymmetry(spectrum_exact(p, omegas));
    ASSERT_GT(std::abs(exact), kAsymmetryThreshold);
    EXPECT_EQ(std::signbit(asymmetry(mc)), std::signbit(exact));
}

TEST(McSpectrum, SeedDeterminism) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto omegas = coarse_grid(200.0, 21);
    McSpectrumOptions opt;
    opt.t_relax = 0.3;
    opt.tau_max = 0.1;
    opt.realizations = 100;
    opt.batches = 10;
    setenv("FLUOROSPEC_THREADS", "1", 1);
    const auto a = mc_steady_spectrum(p, omegas, opt);
    setenv("FLUOROSPEC_THREADS", "3", 1);
    const auto b = mc_steady_spectrum(p, omegas, opt);
    unsetenv("FLUOROSPEC_THREADS");
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.stderrs, b.stderrs);
}

TEST(McSpectrum, ErrorShrinksWithEnsembleSize) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto omegas = coarse_grid(200.0, 41);
    const auto exact = spectrum_exact(p, omegas);
    McSpectrumOptions opt;
    opt.t_relax = 0.3;
    opt.tau_max = 0.2;
    std::vector<double> errors;
    for (std::size_t n : {1000u, 4000u, 16000u}) {
        opt.realizations = n;
        errors.push_back(fstest::sup_diff(mc_steady_spectrum(p, omegas, opt), exact));
    }
    // expected ratio 2 per step; allow statistical slack
    EXPECT_LT(errors[1], errors[0] * 1.2);
    EXPECT_LT(errors[2], errors[1] * 1.2);
    EXPECT_LT(errors[2], errors[0]);
    RecordProperty("errors", std::to_string(errors[0]) + " " + std::to_string(errors[1]) + " " +
                                 std::to_string(errors[2]));
}
