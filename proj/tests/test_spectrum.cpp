#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fluorospec/bloch.hpp"
#include "fluorospec/error.hpp"
#include "fluorospec/features.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/spectrum.hpp"
#include "test_support.hpp"

using namespace fluorospec;

namespace {

const cplx I{0.0, 1.0};

std::vector<Extremum> maxima(const Spectrum& s) {
    std::vector<Extremum> out;
    for (const auto& e : find_extrema(s))
        if (e.kind == ExtremumKind::max) out.push_back(e);
    return out;
}

std::vector<double> symmetric_grid(double half, std::size_t points) {
    return FrequencyGrid{-half, half, points}.values();
}

}  // namespace

TEST(LaplaceD, UndrivenIsZero) {
    const DriveParams p{1.0, 0.0, 3.0, 20.0};
    for (cplx z : {cplx{0.5, 0.0}, cplx{0.0, 7.0}, cplx{-0.3, 2.0}}) EXPECT_EQ(laplace_D(p, z), cplx(0.0, 0.0));
}

TEST(LaplaceD, PoleAtOriginIsRejected) {
    try {
        laplace_D({1.0, 2.0, 0.0, 0.0}, cplx{0.0, 0.0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::pole_at_origin);
    }
}

TEST(LaplaceD, LargeArgumentAsymptote) {
    const DriveParams ref{1.0, 50.0, 0.0, 100.0};
    const double population = 0.5 * (1.0 + steady_state(ref).sigma_z);
    for (cplx z : {cplx{1e8, 0.0}, cplx{0.0, 1e8}, cplx{0.0, -1e8}})
        EXPECT_NEAR(std::abs(z * laplace_D(ref, z) - population), 0.0, 1e-6);

    // the 1/z correction scales with the largest rate
    fstest::ParamGenerator gen(31);
    for (int i = 0; i < 50; ++i) {
        const DriveParams p = gen();
        const double pop = 0.5 * (1.0 + steady_state(p).sigma_z);
        const cplx z{0.0, 1e8 * p.max_rate()};
        EXPECT_NEAR(std::abs(z * laplace_D(p, z) - pop), 0.0, 1e-6) << i;
    }
}

TEST(LaplaceD, ResidueAtOriginIsElasticWeight) {
    const DriveParams ref{1.0, 50.0, 0.0, 100.0};
    const cplx z0{1e-6, 0.0};
    EXPECT_NEAR(std::abs(z0 * laplace_D(ref, z0) - elastic_weight(ref)), 0.0, 1e-8);

    // the O(z) remainder scales with the slowest rate
    fstest::ParamGenerator gen(37);
    for (int i = 0; i < 100; ++i) {
        const DriveParams p = gen();
        const cplx z{1e-8 * slowest_decay_rate(p), 0.0};
        EXPECT_NEAR(std::abs(z * laplace_D(p, z) - elastic_weight(p)), 0.0, 1e-8) << i;
    }
}

TEST(LaplaceD, RegularPartDiffersOnlyByThePole) {
    fstest::ParamGenerator gen(41);
    for (int i = 0; i < 100; ++i) {
        const DriveParams p = gen();
        const double r = elastic_weight(p);
        for (cplx z : {cplx{0.0, 0.37}, cplx{0.0, -25.0}, cplx{1.5, 40.0}}) {
            const cplx full = laplace_D(p, z);
            const cplx diff = full - laplace_D_regular(p, z) - r / z;
            EXPECT_LT(std::abs(diff), 1e-12 * std::max(1.0, std::abs(full))) << i;
        }
    }
}

TEST(SpectrumExact, UndrivenIsZero) {
    const DriveParams p{1.0, 0.0, 0.0, 50.0};
    const auto s = spectrum_exact(p, default_grid(p).values());
    EXPECT_EQ(fstest::sup_abs(s.values), 0.0);
    EXPECT_EQ(s.elastic_weight, 0.0);
    EXPECT_EQ(s.method, Method::exact);
}

TEST(SpectrumExact, NarrowLaserShowsSuppressedTriplet) {
    const DriveParams p{1.0, 50.0, 0.0, 10.0};
    const auto grid = default_grid(p);
    const auto s = spectrum_exact(p, grid.values());
    const auto m = maxima(s);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_NEAR(m[0].omega, -50.0, 3.0);
    EXPECT_NEAR(m[1].omega, 0.0, grid.step());
    EXPECT_NEAR(m[2].omega, 50.0, 3.0);
    // central peak well below the threefold Mollow ratio
    EXPECT_LT(m[1].value / (0.5 * (m[0].value + m[2].value)), 2.0);
}

TEST(SpectrumExact, BroadLaserBurnsHoleAtLineCentre) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto omegas = default_grid(p).values();
    const auto s = spectrum_exact(p, omegas);
    const std::size_t c = omegas.size() / 2;
    ASSERT_EQ(omegas[c], 0.0);
    EXPECT_LT(s.values[c], s.values[c - 1]);
    EXPECT_LT(s.values[c], s.values[c + 1]);
    const auto m = maxima(s);
    ASSERT_EQ(m.size(), 2u);
    EXPECT_LT(m[0].omega, 0.0);
    EXPECT_GT(m[1].omega, 0.0);
}

TEST(SpectrumExact, ZeroFrequencySampleIsTheContinuousLimit) {
    const DriveParams p{1.0, 50.0, 20.0, 100.0};
    const std::vector<double> omegas{-1e-4, 0.0, 1e-4};
    const auto s = spectrum_exact(p, omegas);
    EXPECT_TRUE(std::isfinite(s.values[1]));
    EXPECT_NEAR(s.values[1], 0.5 * (s.values[0] + s.values[2]), 1e-9);
}

TEST(SpectrumExact, ElasticWeightIsCoherentIntensity) {
    fstest::ParamGenerator gen(43);
    for (int i = 0; i < 20; ++i) {
        const DriveParams p = gen();
        const auto s = spectrum_exact(p, std::vector<double>{-1.0, 1.0});
        EXPECT_NEAR(s.elastic_weight, std::norm(steady_state(p).sigma_minus), 1e-9);
        EXPECT_GE(s.elastic_weight, 0.0);
    }
}

TEST(SpectrumResolvent, MatchesExactOnRandomParams) {
    fstest::ParamGenerator gen(47);
    for (int i = 0; i < 100; ++i) {
        const DriveParams p = gen();
        const auto omegas = default_grid(p, 401).values();
        const auto a = spectrum_exact(p, omegas);
        const auto b = spectrum_resolvent(p, omegas);
        EXPECT_EQ(b.method, Method::resolvent);
        EXPECT_LE(fstest::sup_diff(a, b), 1e-10 * fstest::sup_abs(a.values)) << i;
        EXPECT_NEAR(a.elastic_weight, b.elastic_weight, 1e-12);
    }
}

TEST(SpectrumResolvent, UndrivenIsZero) {
    const DriveParams p{1.0, 0.0, 10.0, 5.0};
    EXPECT_LT(fstest::sup_abs(spectrum_resolvent(p, default_grid(p, 101).values()).values), 1e-15);
}

TEST(SpectrumResolvent, DetunedBroadLaserIsAsymmetric) {
    const DriveParams p{1.0, 50.0, 200.0, 200.0};
    const auto s = spectrum_resolvent(p, default_grid(p).values());
    EXPECT_GT(asymmetry(s), kAsymmetryThreshold);
    EXPECT_LT(fstest::sup_diff(s, spectrum_exact(p, s.omegas)), 1e-10 * fstest::sup_abs(s.values));
}

TEST(SpectrumApprox, ResonantCaseIsSymmetric) {
    const DriveParams p{1.0, 5.0, 0.0, 200.0};
    const auto s = spectrum_approx_broadband(p, default_grid(p).values());
    const std::size_t n = s.values.size();
    for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(s.values[k], s.values[n - 1 - k]);
    EXPECT_EQ(s.elastic_weight, 0.0);
    EXPECT_EQ(s.method, Method::approx);
}

TEST(SpectrumApprox, ResonantCaseIsThreeLorentzians) {
    const DriveParams p{1.0, 5.0, 0.0, 200.0};
    const double g = p.big_gamma();
    const double gz = p.gamma_z();
    const double r2 = p.rabi * p.rabi;
    const double pre = g / (4.0 * (gz * g + r2));
    const auto lorentz = [](double width, double w) { return 1.0 / (width * width + w * w); };
    const auto omegas = default_grid(p, 101).values();
    const auto s = spectrum_approx_broadband(p, omegas);
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = omegas[k];
        const double expected = pre * r2 *
                                (lorentz(g, w) + lorentz(g - r2 / g, w) -
                                 std::pow(p.rabi / g, 4) * lorentz(gz + r2 / g, w));
        EXPECT_NEAR(s.values[k], expected, 1e-15);
    }
}

TEST(SpectrumApprox, AgreesWithExactInBroadbandRegime) {
    const DriveParams p{1.0, 5.0, 0.0, 200.0};
    const auto omegas = default_grid(p).values();
    const auto approx = spectrum_approx_broadband(p, omegas);
    const auto exact = spectrum_exact(p, omegas);
    EXPECT_TRUE(approx.in_regime);
    // measured 0.5 %
    EXPECT_LT(fstest::relative_sup(approx, exact, 4.0 * p.big_gamma()), 0.01);
}

TEST(SpectrumApprox, LineCentreIsDetuningIndependent) {
    const std::vector<double> zero{0.0};
    const double ref = spectrum_approx_broadband({1.0, 5.0, 0.0, 200.0}, zero).values[0];
    for (double d : {-300.0, -7.0, 3.0, 150.0})
        EXPECT_EQ(spectrum_approx_broadband({1.0, 5.0, d, 200.0}, zero).values[0], ref);
}

TEST(SpectrumApprox, OutOfRegimeIsFlagged) {
    EXPECT_FALSE(spectrum_approx_broadband({1.0, 50.0, 0.0, 10.0}, std::vector<double>{0.0}).in_regime);
    EXPECT_FALSE(broadband_regime({1.0, 5.0, 100.0, 200.0}));
    EXPECT_TRUE(broadband_regime({1.0, 5.0, 20.0, 200.0}));
}

TEST(ElasticWeight, UndrivenIsZero) { EXPECT_EQ(elastic_weight({1.0, 0.0, 1.0, 1.0}), 0.0); }

TEST(ElasticWeight, SaturationExample) {
    EXPECT_NEAR(elastic_weight({1.0, std::numbers::sqrt2, 0.0, 0.0}), 0.125, 1e-15);
}

TEST(ElasticWeight, FallsAsInverseSquareOfLinewidth) {
    std::vector<double> logs_l;
    std::vector<double> logs_w;
    for (double l : {1e3, 1e4, 1e5}) {
        logs_l.push_back(std::log(l));
        logs_w.push_back(std::log(elastic_weight({1.0, 5.0, 0.0, l})));
    }
    const double slope_a = (logs_w[1] - logs_w[0]) / (logs_l[1] - logs_l[0]);
    const double slope_b = (logs_w[2] - logs_w[1]) / (logs_l[2] - logs_l[1]);
    EXPECT_NEAR(slope_a, -2.0, 0.02);
    EXPECT_NEAR(slope_b, -2.0, 0.002);
}

TEST(SpectrumFromCorrelation, ZeroTraceGivesZeroSpectrum) {
    CorrelationTrace trace;
    trace.taus = {0.0, 0.1, 0.2, 0.3};
    trace.values.assign(4, cplx{0.0, 0.0});
    const auto s = spectrum_from_correlation(trace, std::vector<double>{-1.0, 0.0, 2.0});
    EXPECT_EQ(fstest::sup_abs(s.values), 0.0);
    EXPECT_EQ(s.method, Method::fourier);
}

TEST(SpectrumFromCorrelation, RejectsUndecayedTrace) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto trace = correlation(p, 0.1, 5e-4);
    try {
        spectrum_from_correlation(trace, std::vector<double>{0.0});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::undecayed_trace);
    }
}

TEST(SpectrumFromCorrelation, SingleExponentialTransform) {
    // g(tau) = exp(-a tau) has Re transform a / (a^2 + omega^2)
    const double a = 2.0;
    const double h = 1e-3;
    CorrelationTrace trace;
    for (std::size_t k = 0; k <= 20000; ++k) {
        trace.taus.push_back(h * k);
        trace.values.push_back(std::exp(-a * h * k));
    }
    const std::vector<double> omegas{-3.0, 0.0, 0.5, 10.0};
    const auto s = spectrum_from_correlation(trace, omegas);
    for (std::size_t k = 0; k < omegas.size(); ++k)
        EXPECT_NEAR(s.values[k], a / (a * a + omegas[k] * omegas[k]), 1e-6);
}

TEST(SpectrumFromCorrelation, MatchesExactForBroadLaser) {
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const auto omegas = symmetric_grid(300.0, 1201);
    const auto s = spectrum_from_correlation(correlation(p, 30.0, 5e-4), omegas);
    EXPECT_LT(fstest::sup_diff(s, spectrum_exact(p, omegas)), 1e-4);
    EXPECT_DOUBLE_EQ(s.elastic_weight, elastic_weight(p));
}

TEST(SpectrumFromCorrelation, ReproducesDispersiveAsymmetry) {
    const DriveParams p{1.0, 50.0, 100.0, 200.0};
    const auto omegas = default_grid(p).values();
    const auto win = default_correlation_window(p);
    const auto s = spectrum_from_correlation(correlation(p, win.tau_max, win.dtau), omegas);
    const auto exact = spectrum_exact(p, omegas);
    EXPECT_LT(fstest::sup_diff(s, exact), 1e-4);
    EXPECT_NEAR(asymmetry(s), asymmetry(exact), 1e-3);
    EXPECT_GT(asymmetry(s), kAsymmetryThreshold);
}

TEST(SpectrumFromCorrelation, OracleTriangleOnRandomParams) {
    fstest::ParamGenerator gen(53);
    for (int i = 0; i < 10; ++i) {
        const DriveParams p = gen();
        const auto omegas = default_grid(p, 401).values();
        const auto win = default_correlation_window(p);
        const auto s = spectrum_from_correlation(correlation(p, win.tau_max, win.dtau), omegas);
        EXPECT_LT(fstest::sup_diff(s, spectrum_exact(p, omegas)), 1e-4) << i;
    }
}

TEST(SpectrumInvariants, ExactSpectrumIsNonNegative) {
    fstest::ParamGenerator gen(59);
    for (int i = 0; i < 100; ++i) {
        const DriveParams p = gen();
        const auto s = spectrum_exact(p, default_grid(p, 401).values());
        for (double v : s.values) ASSERT_GE(v, -1e-9) << i;
    }
}

TEST(SpectrumInvariants, ResonantParity) {
    fstest::ParamGenerator gen(61);
    for (int i = 0; i < 50; ++i) {
        DriveParams p = gen();
        p.detuning = 0.0;
        const auto s = spectrum_exact(p, default_grid(p, 401).values());
        const std::size_t n = s.values.size();
        for (std::size_t k = 0; k < n / 2; ++k) ASSERT_NEAR(s.values[k], s.values[n - 1 - k], 1e-9) << i;
    }
}

TEST(SpectrumInvariants, DetuningReflection) {
    fstest::ParamGenerator gen(67);
    for (int i = 0; i < 50; ++i) {
        const DriveParams p = gen();
        DriveParams q = p;
        q.detuning = -p.detuning;
        const auto omegas = default_grid(p, 401).values();
        const auto a = spectrum_exact(p, omegas);
        const auto b = spectrum_exact(q, omegas);
        const std::size_t n = omegas.size();
        for (std::size_t k = 0; k < n; ++k) ASSERT_NEAR(a.values[k], b.values[n - 1 - k], 1e-9) << i;
    }
}

TEST(SpectrumInvariants, SumRuleNormalisationOnSaturationCase) {
    const auto budget = intensity_budget({1.0, std::numbers::sqrt2, 0.0, 0.0});
    EXPECT_NEAR(budget.excited_population, 0.25, 1e-15);
    EXPECT_NEAR(budget.elastic, 0.125, 1e-15);
    EXPECT_NEAR(budget.inelastic, 0.125, 1e-4);
}

TEST(SpectrumInvariants, SumRuleOnRandomParams) {
    fstest::ParamGenerator gen(71);
    for (int i = 0; i < 30; ++i) {
        DriveParams p = gen();
        p.gamma = 1.0;
        const auto budget = intensity_budget(p);
        EXPECT_LT(budget.relative_error(), 1e-3) << i;
    }
}

TEST(SpectrumInvariants, MollowTriplet) {
    const DriveParams p{1.0, 50.0, 0.0, 0.0};
    const auto grid = default_grid(p);
    const auto s = spectrum_exact(p, grid.values());
    const auto m = maxima(s);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_NEAR(m[1].omega, 0.0, grid.step());
    for (const auto& side : {m[0], m[2]}) EXPECT_NEAR(std::abs(side.omega), p.rabi, grid.step() + 0.01 * p.rabi);
    EXPECT_NEAR(m[1].value / (0.5 * (m[0].value + m[2].value)), 3.0, 0.3);
}

TEST(SpectrumInvariants, ResultIndependentOfWorkerCount) {
    const DriveParams p{1.3, 40.0, 25.0, 70.0};
    const auto omegas = default_grid(p).values();
    setenv("FLUOROSPEC_THREADS", "1", 1);
    const auto a = spectrum_exact(p, omegas);
    setenv("FLUOROSPEC_THREADS", "5", 1);
    const auto b = spectrum_exact(p, omegas);
    unsetenv("FLUOROSPEC_THREADS");
    EXPECT_EQ(a.values, b.values);
}
