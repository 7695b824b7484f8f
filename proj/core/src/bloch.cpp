#include "fluorospec/bloch.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fluorospec/error.hpp"
#include "fluorospec/rk4.hpp"

namespace fluorospec {

namespace {

constexpr cplx kI{0.0, 1.0};

// Regression vector (<sigma_-(t+tau) X>, <sigma_+(t+tau) X>, <sigma_z(t+tau) X>)
// for X = sigma_-(t) at steady state.
struct RegressionState {
    cplx minus{};
    cplx plus{};
    cplx z{};

    friend RegressionState operator+(const RegressionState& a, const RegressionState& b) noexcept {
        return {a.minus + b.minus, a.plus + b.plus, a.z + b.z};
    }
    friend RegressionState operator*(const RegressionState& a, double s) noexcept {
        return {a.minus * s, a.plus * s, a.z * s};
    }
};

std::size_t step_count(double span, double dt) {
    const double n = std::ceil(span / dt - 1e-9);
    return static_cast<std::size_t>(std::max(1.0, n));
}

}  // namespace

bool in_bloch_ball(const BlochState& s, double slack) noexcept {
    return 4.0 * std::norm(s.sigma_minus) + s.sigma_z * s.sigma_z <= 1.0 + slack;
}

BlochState bloch_rhs(const BlochState& s, const DriveParams& p) noexcept {
    const cplx relax{p.big_gamma(), p.detuning};
    const cplx d_minus = -relax * s.sigma_minus + 0.5 * kI * p.rabi * s.sigma_z;
    // i * Omega * (s - conj(s)) = -2 * Omega * Im(s)
    const double d_z = -p.gamma_z() * s.sigma_z - 2.0 * p.rabi * s.sigma_minus.imag() - p.gamma_z();
    return {d_minus, d_z};
}

BlochState steady_state(const DriveParams& p) {
    validate(p);
    const double g = p.big_gamma();
    const double gz = p.gamma_z();
    const double g2d2 = g * g + p.detuning * p.detuning;
    const double sz = -gz * g2d2 / (gz * g2d2 + p.rabi * p.rabi * g);
    const cplx sm = 0.5 * kI * p.rabi * sz / cplx{g, p.detuning};
    return {sm, sz};
}

bool is_steady(const BlochState& state, const DriveParams& params, double threshold) {
    const BlochState d = bloch_rhs(state, params);
    return std::sqrt(std::norm(d.sigma_minus) + d.sigma_z * d.sigma_z) < threshold;
}

BlochTrajectory evolve(const BlochState& initial, const DriveParams& params, double t_end,
                       double dt, std::size_t stride) {
    validate(params);
    check_step(params, dt);
    if (!(t_end >= dt)) throw Error(ErrorCode::invalid_argument, "t_end must be at least dt");
    stride = std::max<std::size_t>(stride, 1);

    const std::size_t n = step_count(t_end, dt);
    const double h = t_end / static_cast<double>(n);
    auto rhs = [&params](const BlochState& s) { return bloch_rhs(s, params); };

    BlochTrajectory out;
    out.times.reserve(n / stride + 2);
    out.states.reserve(n / stride + 2);
    out.times.push_back(0.0);
    out.states.push_back(initial);

    BlochState y = initial;
    for (std::size_t k = 1; k <= n; ++k) {
        y = detail::rk4_step(y, h, rhs);
        if (k % stride == 0 || k == n) {
            out.times.push_back(static_cast<double>(k) * h);
            out.states.push_back(y);
        }
    }
    return out;
}

CorrelationTrace correlation(const DriveParams& p, double tau_max, double dtau) {
    validate(p);
    check_step(p, dtau);
    if (!(tau_max >= dtau)) throw Error(ErrorCode::invalid_argument, "tau_max must be at least dtau");

    const BlochState ss = steady_state(p);
    const cplx relax_minus{p.big_gamma(), p.detuning};
    const cplx relax_plus{p.big_gamma(), -p.detuning};
    const double gz = p.gamma_z();
    const double rabi = p.rabi;
    // The affine -gamma_z term of the sigma_z equation multiplies <sigma_-(t)>_s.
    const cplx inhomogeneity = -gz * ss.sigma_minus;

    auto rhs = [&](const RegressionState& x) -> RegressionState {
        return {-relax_minus * x.minus + 0.5 * kI * rabi * x.z,
                -relax_plus * x.plus - 0.5 * kI * rabi * x.z,
                -gz * x.z + kI * rabi * (x.minus - x.plus) + inhomogeneity};
    };

    const std::size_t n = step_count(tau_max, dtau);
    const double h = tau_max / static_cast<double>(n);

    CorrelationTrace trace;
    trace.elastic_limit = std::norm(ss.sigma_minus);
    trace.taus.resize(n + 1);
    trace.values.resize(n + 1);

    RegressionState x{0.0, 0.5 * (1.0 + ss.sigma_z), -ss.sigma_minus};
    trace.taus[0] = 0.0;
    trace.values[0] = x.plus;
    for (std::size_t k = 1; k <= n; ++k) {
        x = detail::rk4_step(x, h, rhs);
        trace.taus[k] = static_cast<double>(k) * h;
        trace.values[k] = x.plus;
    }
    return trace;
}

double slowest_decay_rate(const DriveParams& p) {
    validate(p);
    Eigen::Matrix3cd m;
    const cplx i = kI;
    m << -cplx{p.big_gamma(), p.detuning}, 0.0, 0.5 * i * p.rabi,
        0.0, -cplx{p.big_gamma(), -p.detuning}, -0.5 * i * p.rabi,
        i * p.rabi, -i * p.rabi, -p.gamma_z();
    const Eigen::Vector3cd ev = m.eigenvalues();
    double slowest = std::abs(ev[0].real());
    for (int k = 1; k < 3; ++k) slowest = std::min(slowest, std::abs(ev[k].real()));
    return slowest;
}

CorrelationWindow default_correlation_window(const DriveParams& p) {
    validate(p);
    const double dtau = kDefaultStepFraction * kStepGuard / p.max_rate();
    const double tau_max = std::max(18.0 / slowest_decay_rate(p), 10.0 * dtau);
    return {tau_max, dtau};
}

}  // namespace fluorospec
