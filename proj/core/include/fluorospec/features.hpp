#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "fluorospec/drive_params.hpp"
#include "fluorospec/spectrum.hpp"

namespace fluorospec {

enum class Lineshape { single_peak, triplet, hole_burning, dispersive_center, split_doublet };

/// Upper-case name, e.g. "HOLE_BURNING".
std::string_view to_string(Lineshape c) noexcept;

enum class ExtremumKind { max, min };

struct Extremum {
    std::size_t index = 0;
    double omega = 0.0;
    double value = 0.0;
    ExtremumKind kind = ExtremumKind::max;
};

/// Default prominence as a fraction of the largest |value|.
inline constexpr double kRelativeProminence = 1e-3;
/// |asymmetry| separating HOLE_BURNING from DISPERSIVE_CENTER.
inline constexpr double kAsymmetryThreshold = 0.05;
/// Grid steps within which a maximum counts as "at" 0 or at the detuning for SPLIT_DOUBLET.
inline constexpr double kSplitNearSteps = 5.0;

double default_prominence(const Spectrum& spectrum);

/// Interior local extrema from first-difference sign changes. Adjacent
/// max/min pairs whose height difference is below `prominence` are removed
/// smallest-first, so the result always alternates in kind.
std::vector<Extremum> find_extrema(const Spectrum& spectrum, std::optional<double> prominence = {});

struct HoleMetrics {
    double depth = 0.0;
    double fwhm = 0.0;
};

/// Dip depth (lower shoulder minus centre) and width at half depth, with
/// linear interpolation. Zero unless the spectrum shows a symmetric central hole.
HoleMetrics hole_metrics(const Spectrum& spectrum, std::optional<double> prominence = {});

/// (int_{w>0} - int_{w<0}) / int, trapezoidal; requires a grid symmetric about 0.
double asymmetry(const Spectrum& spectrum);

Lineshape classify(const Spectrum& spectrum, const DriveParams& params,
                   std::optional<double> prominence = {});

struct SpectralFeatures {
    std::vector<Extremum> extrema;
    Lineshape classification = Lineshape::single_peak;
    double hole_depth = 0.0;
    double hole_fwhm = 0.0;
    double asymmetry = 0.0;
};

SpectralFeatures analyze(const Spectrum& spectrum, const DriveParams& params,
                         std::optional<double> prominence = {});

}  // namespace fluorospec
