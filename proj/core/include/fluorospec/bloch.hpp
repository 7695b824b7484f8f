#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fluorospec/drive_params.hpp"

namespace fluorospec {

using cplx = std::complex<double>;

/// Rotating-frame expectation values (<sigma_->, <sigma_z>). <sigma_+> is
/// always the conjugate of sigma_minus and is never stored.
struct BlochState {
    cplx sigma_minus{0.0, 0.0};
    double sigma_z = -1.0;

    cplx sigma_plus() const noexcept { return std::conj(sigma_minus); }

    friend BlochState operator+(const BlochState& a, const BlochState& b) noexcept {
        return {a.sigma_minus + b.sigma_minus, a.sigma_z + b.sigma_z};
    }
    friend BlochState operator*(const BlochState& a, double s) noexcept {
        return {a.sigma_minus * s, a.sigma_z * s};
    }
};

inline constexpr double kBlochBallSlack = 1e-9;

/// 4|<sigma_->|^2 + <sigma_z>^2 <= 1 + slack.
bool in_bloch_ball(const BlochState& s, double slack = kBlochBallSlack) noexcept;

/// Time derivative of the phase-averaged Bloch equations.
BlochState bloch_rhs(const BlochState& state, const DriveParams& params) noexcept;

/// Closed-form fixed point of bloch_rhs.
BlochState steady_state(const DriveParams& params);

/// True when |bloch_rhs| falls below the stationarity threshold.
bool is_steady(const BlochState& state, const DriveParams& params, double threshold = 1e-10);

struct BlochTrajectory {
    std::vector<double> times;
    std::vector<BlochState> states;
};

/// Fixed-step RK4 integration from `initial` to `t_end`. The step is shrunk
/// uniformly so that an integer number of steps lands exactly on t_end;
/// every `stride`-th step is recorded, plus t = 0 and t_end.
BlochTrajectory evolve(const BlochState& initial, const DriveParams& params, double t_end,
                       double dt, std::size_t stride = 1);

/// Stationary two-time correlation g(tau) = <sigma_+(t+tau) sigma_-(t)>.
struct CorrelationTrace {
    std::vector<double> taus;
    std::vector<cplx> values;
    double elastic_limit = 0.0;  ///< |<sigma_->_s|^2, the tau -> infinity limit
};

/// Quantum-regression integration of the correlation on a uniform tau grid
/// [0, tau_max] with spacing dtau (shrunk to land on tau_max).
CorrelationTrace correlation(const DriveParams& params, double tau_max, double dtau);

/// Slowest decay rate of the homogeneous Bloch generator (smallest |Re lambda|).
double slowest_decay_rate(const DriveParams& params);

struct CorrelationWindow {
    double tau_max;
    double dtau;
};

/// Default regression window: dtau at the stability guard, tau_max long
/// enough for g - g_inf to decay by ~e^-18 at the slowest rate.
CorrelationWindow default_correlation_window(const DriveParams& params);

}  // namespace fluorospec
