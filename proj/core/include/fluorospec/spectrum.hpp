#pragma once

#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "fluorospec/bloch.hpp"
#include "fluorospec/drive_params.hpp"

namespace fluorospec {

enum class Method { exact, resolvent, approx, dressed, fourier, monte_carlo };

std::string_view to_string(Method m) noexcept;

/// Continuous (inelastic) fluorescence spectrum on a grid of offsets from the
/// laser frequency. The coherent delta line at omega = 0 is carried separately
/// in elastic_weight and never folded into `values`.
struct Spectrum {
    std::vector<double> omegas;
    std::vector<double> values;
    double elastic_weight = 0.0;
    Method method = Method::exact;
    /// False when an approximate evaluator was used outside its stated regime.
    bool in_regime = true;
    /// Per-point standard errors; only filled for Monte Carlo estimates.
    std::vector<double> stderrs;
};

/// Laplace transform D(z) of the stationary correlation <sigma_+(t+tau) sigma_-(t)>.
/// Throws pole_at_origin for z == 0 and singular_denominator when the
/// denominator magnitude drops below 1e-300.
cplx laplace_D(const DriveParams& params, cplx z);

/// D(z) - R / z with the elastic residue R = |<sigma_->_s|^2 divided out
/// exactly; finite at z = 0, so Re D(i omega) is available at omega = 0.
cplx laplace_D_regular(const DriveParams& params, cplx z);

/// Lambda(omega) = Re D(i omega) from the closed-form rational transform.
/// Evaluated through laplace_D_regular (R / (i omega) is purely imaginary),
/// which also gives the continuous value at omega = 0.
Spectrum spectrum_exact(const DriveParams& params, std::span<const double> omegas);

/// Same quantity from the 3x3 Bloch generator M: Re[(i omega - M)^-1 (x0 - <sigma_->_s s)]
/// for the regression start x0 and stationary vector s, both from linear
/// solves rather than the closed forms.
Spectrum spectrum_resolvent(const DriveParams& params, std::span<const double> omegas);

/// Three-Lorentzian broadband approximation, valid for Gamma >> Omega, |Delta|, gamma_z.
Spectrum spectrum_approx_broadband(const DriveParams& params, std::span<const double> omegas);

/// True when Gamma >= 10 max(Omega, |Delta|, gamma_z).
bool broadband_regime(const DriveParams& params) noexcept;

/// Weight |<sigma_->_s|^2 of the coherent line at the laser frequency.
double elastic_weight(const DriveParams& params);

/// Re of the trapezoidal transform of g(tau) - g_inf; requires a decayed,
/// uniformly sampled trace.
Spectrum spectrum_from_correlation(const CorrelationTrace& trace, std::span<const double> omegas);

/// Re of the trapezoidal sum h * sum_k w_k f_k exp(-i omega k h) for each
/// omega (end weights 1/2), i.e. Re int_0^T f(tau) exp(-i omega tau) dtau.
std::vector<double> trapezoid_transform(std::span<const cplx> samples, double h,
                                        std::span<const double> omegas);

/// Components of the intensity sum rule (1/pi) int Lambda + elastic = (1 + <sigma_z>_s)/2.
struct IntensityBudget {
    double inelastic = 0.0;  ///< (1/pi) times the integral of Lambda over the real line
    double elastic = 0.0;
    double excited_population = 0.0;  ///< (1 + <sigma_z>_s) / 2

    double relative_error() const noexcept;
};

/// Trapezoidal integral over +-40 max(Gamma, sqrt(Omega^2 + Delta^2)) with
/// step gamma/4, closed by the analytic c/omega^2 tails beyond the grid.
IntensityBudget intensity_budget(const DriveParams& params);

}  // namespace fluorospec
