#pragma once

#include <array>
#include <span>
#include <vector>

#include "fluorospec/bloch.hpp"
#include "fluorospec/spectrum.hpp"

namespace fluorospec {

// Dressed-state picture at resonance, with |+-> = (|0> +- |1>)/sqrt(2).
// Every entry point rejects a nonzero detuning.

struct DressedState {
    double r_pp = 0.5;
    double r_mm = 0.5;
    cplx r_pm{0.0, 0.0};
    cplx r_mp{0.0, 0.0};

    friend DressedState operator+(const DressedState& a, const DressedState& b) noexcept {
        return {a.r_pp + b.r_pp, a.r_mm + b.r_mm, a.r_pm + b.r_pm, a.r_mp + b.r_mp};
    }
    friend DressedState operator*(const DressedState& a, double s) noexcept {
        return {a.r_pp * s, a.r_mm * s, a.r_pm * s, a.r_mp * s};
    }
};

/// Secular equations of motion of the dressed populations and coherences.
DressedState dressed_rhs(const DressedState& state, const DriveParams& params);

struct DressedTrajectory {
    std::vector<double> times;
    std::vector<DressedState> states;
};

DressedTrajectory evolve_dressed(const DressedState& initial, const DriveParams& params,
                                 double t_end, double dt, std::size_t stride = 1);

/// Closed-form eigenvalues -Gamma_+ +- sqrt(Gamma_-^2 - Omega^2) of the
/// coupled coherence pair (r_pm, r_mp).
std::array<cplx, 2> coherence_eigenvalues(const DriveParams& params);

/// The decomposition assumes Omega >> gamma; flagged in-regime for Omega >= 10 gamma.
bool dressed_regime(const DriveParams& params) noexcept;

/// Lorentzian from transitions between like dressed states: Gamma / (4 (Gamma^2 + w^2)).
Spectrum lambda0(const DriveParams& params, std::span<const double> omegas);

/// Component from the correlated |+> -> |-> and |-> -> |+> channels.
Spectrum lambda1(const DriveParams& params, std::span<const double> omegas);

/// lambda0 + lambda1 pointwise.
Spectrum dressed_total(const DriveParams& params, std::span<const double> omegas);

}  // namespace fluorospec
