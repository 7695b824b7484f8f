#include "fluorospec/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "fluorospec/error.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/parallel.hpp"

namespace fluorospec {

namespace {

constexpr cplx kI{0.0, 1.0};

cplx laplace_D_at(const DriveParams& p, const BlochState& ss, cplx z) {
    if (z == cplx{0.0, 0.0})
        throw Error(ErrorCode::pole_at_origin, "D(z) has a simple pole at z = 0");
    const double g = p.big_gamma();
    const double gz = p.gamma_z();
    const double rabi2 = p.rabi * p.rabi;
    const cplx coherence = cplx{g, p.detuning} + z;

    const cplx numerator = (coherence * (gz + z) + 0.5 * rabi2) * (1.0 + ss.sigma_z) +
                           kI * p.rabi * coherence * (1.0 + gz / z) * ss.sigma_minus;
    const cplx denominator = 2.0 * (gz + z) * ((g + z) * (g + z) + p.detuning * p.detuning) +
                             2.0 * rabi2 * (g + z);
    if (std::abs(denominator) < 1e-300)
        throw Error(ErrorCode::singular_denominator, "D(z) denominator vanishes");
    return numerator / denominator;
}

// D(z) with the elastic pole R / z removed by exact polynomial division.
// The pole term (1 + gamma_z / z) Q(z) / Den(z) splits into
// Q(z) / Den(z) + gamma_z Q(0) / (z Den(0)) + gamma_z [Q(z) Den(0) - Q(0) Den(z)] / (z Den(z) Den(0)),
// and the bracket is divisible by z coefficient-wise.
cplx laplace_D_regular_at(const DriveParams& p, const BlochState& ss, cplx z) {
    const double g = p.big_gamma();
    const double gz = p.gamma_z();
    const double rabi2 = p.rabi * p.rabi;
    const double g2d2 = g * g + p.detuning * p.detuning;
    const cplx coherence = cplx{g, p.detuning} + z;

    const double d0 = 2.0 * gz * g2d2 + 2.0 * rabi2 * g;
    const double d1 = 2.0 * (2.0 * gz * g + g2d2) + 2.0 * rabi2;
    const double d2 = 2.0 * (gz + 2.0 * g);
    const double d3 = 2.0;
    const cplx den = d0 + z * (d1 + z * (d2 + z * d3));
    if (std::abs(den) < 1e-300 || std::abs(d0) < 1e-300)
        throw Error(ErrorCode::singular_denominator, "D(z) denominator vanishes");

    const cplx q0 = kI * p.rabi * cplx{g, p.detuning} * ss.sigma_minus;
    const cplx q1 = kI * p.rabi * ss.sigma_minus;
    const cplx populations = (coherence * (gz + z) + 0.5 * rabi2) * (1.0 + ss.sigma_z);
    const cplx q = q0 + q1 * z;
    const cplx deflated = (q1 * d0 - q0 * d1) - q0 * z * (d2 + d3 * z);
    return (populations + q) / den + gz * deflated / (den * d0);
}

Eigen::Matrix3cd bloch_generator(const DriveParams& p) {
    Eigen::Matrix3cd m;
    m << -cplx{p.big_gamma(), p.detuning}, 0.0, 0.5 * kI * p.rabi,
        0.0, -cplx{p.big_gamma(), -p.detuning}, -0.5 * kI * p.rabi,
        kI * p.rabi, -kI * p.rabi, -p.gamma_z();
    return m;
}

}  // namespace

std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::exact: return "exact";
        case Method::resolvent: return "resolvent";
        case Method::approx: return "approx";
        case Method::dressed: return "dressed";
        case Method::fourier: return "fourier";
        case Method::monte_carlo: return "monte-carlo";
    }
    return "unknown";
}

cplx laplace_D(const DriveParams& params, cplx z) {
    return laplace_D_at(params, steady_state(params), z);
}

cplx laplace_D_regular(const DriveParams& params, cplx z) {
    return laplace_D_regular_at(params, steady_state(params), z);
}

double elastic_weight(const DriveParams& params) {
    return std::norm(steady_state(params).sigma_minus);
}

Spectrum spectrum_exact(const DriveParams& params, std::span<const double> omegas) {
    const BlochState ss = steady_state(params);
    Spectrum out;
    out.method = Method::exact;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    out.elastic_weight = std::norm(ss.sigma_minus);
    parallel_for(omegas.size(), [&](std::size_t k) {
        out.values[k] = laplace_D_regular_at(params, ss, kI * omegas[k]).real();
    });
    return out;
}

Spectrum spectrum_resolvent(const DriveParams& params, std::span<const double> omegas) {
    validate(params);
    const Eigen::Matrix3cd m = bloch_generator(params);
    const Eigen::Vector3cd drive(0.0, 0.0, -params.gamma_z());

    // Stationary expectations from M s + b = 0.
    const Eigen::PartialPivLU<Eigen::Matrix3cd> lu_m(m);
    if (lu_m.rcond() < 1e-14)
        throw Error(ErrorCode::singular_resolvent, "Bloch generator is singular");
    const Eigen::Vector3cd ss = lu_m.solve(-drive);
    const cplx sm = ss[0];
    const double sz = ss[2].real();

    // Regression start minus its factorised long-time part <sigma_->_s * s;
    // what remains decays, so the transform has no pole at z = 0.
    const Eigen::Vector3cd fluctuation = Eigen::Vector3cd(0.0, 0.5 * (1.0 + sz), -sm) - sm * ss;

    Spectrum out;
    out.method = Method::resolvent;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    out.elastic_weight = std::norm(sm);

    std::vector<int> singular(omegas.size(), 0);
    parallel_for(omegas.size(), [&](std::size_t k) {
        const cplx z = kI * omegas[k];
        const Eigen::Matrix3cd a = z * Eigen::Matrix3cd::Identity() - m;
        const Eigen::PartialPivLU<Eigen::Matrix3cd> lu(a);
        if (lu.rcond() < 1e-14) {
            singular[k] = 1;
            return;
        }
        out.values[k] = lu.solve(fluctuation)[1].real();
    });
    if (std::any_of(singular.begin(), singular.end(), [](int s) { return s != 0; }))
        throw Error(ErrorCode::singular_resolvent, "resolvent is singular on the grid");
    return out;
}

bool broadband_regime(const DriveParams& p) noexcept {
    return p.big_gamma() >= 10.0 * std::max({p.rabi, std::abs(p.detuning), p.gamma_z()});
}

Spectrum spectrum_approx_broadband(const DriveParams& params, std::span<const double> omegas) {
    validate(params);
    const double g = params.big_gamma();
    const double gz = params.gamma_z();
    const double rabi2 = params.rabi * params.rabi;
    const double delta = params.detuning;
    const double prefactor = g / (4.0 * (gz * g + rabi2));
    const double shifted = g - rabi2 / g;
    const double narrow = gz + rabi2 / g;
    const double weight = std::pow(params.rabi / g, 4);

    Spectrum out;
    out.method = Method::approx;
    out.in_regime = broadband_regime(params);
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const double w = omegas[k];
        const double w2 = w * w;
        out.values[k] = prefactor * ((rabi2 - 2.0 * delta * w) / (g * g + w2) +
                                     (rabi2 + 2.0 * delta * w) / (shifted * shifted + w2) -
                                     weight * (rabi2 + 2.0 * delta * w) / (narrow * narrow + w2));
    }
    return out;
}

Spectrum spectrum_from_correlation(const CorrelationTrace& trace, std::span<const double> omegas) {
    const std::size_t n = trace.values.size();
    if (n < 2 || trace.taus.size() != n)
        throw Error(ErrorCode::invalid_argument, "correlation trace needs at least two samples");
    if (trace.taus.front() != 0.0)
        throw Error(ErrorCode::invalid_argument, "correlation trace must start at tau = 0");
    const double h = trace.taus.back() / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < n; ++k) {
        const double expected = trace.taus.front() + static_cast<double>(k) * h;
        if (std::abs(trace.taus[k] - expected) > 1e-9 * std::max(1.0, std::abs(trace.taus.back())))
            throw Error(ErrorCode::invalid_argument, "correlation trace must be uniformly sampled");
    }
    const double g0 = std::abs(trace.values.front());
    const double tail = std::abs(trace.values.back() - trace.elastic_limit);
    if (tail > 1e-6 * g0)
        throw Error(ErrorCode::undecayed_trace,
                    "correlation has not decayed to its elastic limit; increase tau_max");

    std::vector<cplx> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = trace.values[k] - trace.elastic_limit;

    Spectrum out;
    out.method = Method::fourier;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values = trapezoid_transform(f, h, omegas);
    out.elastic_weight = trace.elastic_limit;
    return out;
}

std::vector<double> trapezoid_transform(std::span<const cplx> samples, double h,
                                        std::span<const double> omegas) {
    const std::size_t n = samples.size();
    std::vector<double> out(omegas.size(), 0.0);
    if (n < 2) return out;
    parallel_for(omegas.size(), [&](std::size_t j) {
        const double w = omegas[j];
        const cplx rotation = std::polar(1.0, -w * h);
        cplx phasor{1.0, 0.0};
        double acc = 0.5 * samples[0].real();
        for (std::size_t k = 1; k < n; ++k) {
            // re-seed the recurrence periodically to bound rounding drift
            phasor = (k % 1024 == 0) ? std::polar(1.0, -w * static_cast<double>(k) * h)
                                     : phasor * rotation;
            const double term = samples[k].real() * phasor.real() - samples[k].imag() * phasor.imag();
            acc += (k + 1 == n) ? 0.5 * term : term;
        }
        out[j] = acc * h;
    });
    return out;
}

double IntensityBudget::relative_error() const noexcept {
    if (excited_population == 0.0) return std::abs(inelastic + elastic);
    return std::abs(inelastic + elastic - excited_population) / excited_population;
}

IntensityBudget intensity_budget(const DriveParams& params) {
    const BlochState ss = steady_state(params);
    const double half = 40.0 * std::max(params.big_gamma(), std::hypot(params.rabi, params.detuning));
    std::size_t points = static_cast<std::size_t>(std::ceil(2.0 * half / (0.25 * params.gamma))) + 1;
    if (points % 2 == 0) ++points;
    const FrequencyGrid grid{-half, half, points};

    const std::vector<double> omegas = grid.values();
    std::vector<double> values(points);
    parallel_for(points, [&](std::size_t k) {
        values[k] = laplace_D_regular_at(params, ss, kI * omegas[k]).real();
    });
    const double h = omegas[1] - omegas[0];
    double integral = 0.5 * (values.front() + values.back());
    for (std::size_t k = 1; k + 1 < points; ++k) integral += values[k];
    integral *= h;
    // Beyond the grid Lambda ~ c / omega^2, whose tail integral is Lambda(W) * W.
    integral += values.front() * half + values.back() * half;

    IntensityBudget out;
    out.inelastic = integral / std::numbers::pi;
    out.elastic = std::norm(ss.sigma_minus);
    out.excited_population = 0.5 * (1.0 + ss.sigma_z);
    return out;
}

}  // namespace fluorospec
