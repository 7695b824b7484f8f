#include "fluorospec/dressed.hpp"

#include <cmath>

#include "fluorospec/error.hpp"
#include "fluorospec/rk4.hpp"

namespace fluorospec {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_resonance(const DriveParams& p) {
    validate(p);
    if (p.detuning != 0.0)
        throw Error(ErrorCode::nonzero_detuning, "dressed decomposition defined only at resonance");
}

}  // namespace

DressedState dressed_rhs(const DressedState& s, const DriveParams& p) {
    require_resonance(p);
    const double g = p.big_gamma();
    const double gp = p.gamma_plus();
    const double gm = p.gamma_minus();
    return {-g * s.r_pp + 0.5 * g,
            -g * s.r_mm + 0.5 * g,
            -(gp - kI * p.rabi) * s.r_pm + gm * s.r_mp,
            -(gp + kI * p.rabi) * s.r_mp + gm * s.r_pm};
}

DressedTrajectory evolve_dressed(const DressedState& initial, const DriveParams& params,
                                 double t_end, double dt, std::size_t stride) {
    require_resonance(params);
    check_step(params, dt);
    if (!(t_end >= dt)) throw Error(ErrorCode::invalid_argument, "t_end must be at least dt");
    stride = std::max<std::size_t>(stride, 1);

    const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / dt - 1e-9)));
    const double h = t_end / static_cast<double>(n);
    auto rhs = [&params](const DressedState& s) { return dressed_rhs(s, params); };

    DressedTrajectory out;
    out.times.push_back(0.0);
    out.states.push_back(initial);
    DressedState y = initial;
    for (std::size_t k = 1; k <= n; ++k) {
        y = detail::rk4_step(y, h, rhs);
        if (k % stride == 0 || k == n) {
            out.times.push_back(static_cast<double>(k) * h);
            out.states.push_back(y);
        }
    }
    return out;
}

std::array<cplx, 2> coherence_eigenvalues(const DriveParams& p) {
    require_resonance(p);
    const cplx root = std::sqrt(cplx{p.gamma_minus() * p.gamma_minus() - p.rabi * p.rabi, 0.0});
    return {-p.gamma_plus() + root, -p.gamma_plus() - root};
}

bool dressed_regime(const DriveParams& p) noexcept { return p.rabi >= 10.0 * p.gamma; }

Spectrum lambda0(const DriveParams& params, std::span<const double> omegas) {
    require_resonance(params);
    const double g = params.big_gamma();
    Spectrum out;
    out.method = Method::dressed;
    out.in_regime = dressed_regime(params);
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k)
        out.values[k] = g / (4.0 * (g * g + omegas[k] * omegas[k]));
    return out;
}

Spectrum lambda1(const DriveParams& params, std::span<const double> omegas) {
    require_resonance(params);
    const double gz = params.gamma_z();
    const double gp = params.gamma_plus();
    const double gm = params.gamma_minus();
    const double shift = params.rabi * params.rabi - gm * gm;
    Spectrum out;
    out.method = Method::dressed;
    out.in_regime = dressed_regime(params);
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    for (std::size_t k = 0; k < omegas.size(); ++k) {
        const cplx iw{0.0, omegas[k]};
        const cplx pole = (gp + iw) * (gp + iw) + shift;
        out.values[k] = 0.25 * ((gz + iw) / pole).real();
    }
    return out;
}

Spectrum dressed_total(const DriveParams& params, std::span<const double> omegas) {
    Spectrum total = lambda0(params, omegas);
    const Spectrum one = lambda1(params, omegas);
    for (std::size_t k = 0; k < total.values.size(); ++k) total.values[k] += one.values[k];
    return total;
}

}  // namespace fluorospec
