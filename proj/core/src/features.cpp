#include "fluorospec/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluorospec/error.hpp"

namespace fluorospec {

namespace {

constexpr std::size_t kMinGridPoints = 5;

double grid_step(const Spectrum& s) {
    return (s.omegas.back() - s.omegas.front()) / static_cast<double>(s.omegas.size() - 1);
}

struct CentralHole {
    std::size_t left;    // position in the extrema list
    std::size_t centre;
    std::size_t right;
};

std::optional<CentralHole> find_central_hole(const std::vector<Extremum>& ext, double step) {
    for (std::size_t i = 1; i + 1 < ext.size(); ++i) {
        if (ext[i].kind != ExtremumKind::min) continue;
        if (std::abs(ext[i].omega) > step * (1.0 + 1e-9)) continue;
        if (ext[i - 1].kind == ExtremumKind::max && ext[i + 1].kind == ExtremumKind::max)
            return CentralHole{i - 1, i, i + 1};
    }
    return std::nullopt;
}

// Position where `values` first reaches `level` walking from `from` in direction `dir`.
double crossing(const Spectrum& s, std::size_t from, int dir, double level) {
    std::size_t k = from;
    while (true) {
        const std::size_t next = dir > 0 ? k + 1 : k - 1;
        if ((dir > 0 && next >= s.values.size()) || (dir < 0 && k == 0)) return s.omegas[k];
        if (s.values[next] >= level) {
            const double v0 = s.values[k];
            const double v1 = s.values[next];
            const double t = v1 == v0 ? 0.0 : (level - v0) / (v1 - v0);
            return s.omegas[k] + t * (s.omegas[next] - s.omegas[k]);
        }
        k = next;
    }
}

HoleMetrics metrics_for(const Spectrum& s, const std::vector<Extremum>& ext, const CentralHole& hole) {
    const Extremum& c = ext[hole.centre];
    const double shoulder = std::min(ext[hole.left].value, ext[hole.right].value);
    HoleMetrics m;
    m.depth = shoulder - c.value;
    const double level = c.value + 0.5 * m.depth;
    m.fwhm = crossing(s, c.index, +1, level) - crossing(s, c.index, -1, level);
    return m;
}

}  // namespace

std::string_view to_string(Lineshape c) noexcept {
    switch (c) {
        case Lineshape::single_peak: return "SINGLE_PEAK";
        case Lineshape::triplet: return "TRIPLET";
        case Lineshape::hole_burning: return "HOLE_BURNING";
        case Lineshape::dispersive_center: return "DISPERSIVE_CENTER";
        case Lineshape::split_doublet: return "SPLIT_DOUBLET";
    }
    return "UNKNOWN";
}

double default_prominence(const Spectrum& spectrum) {
    double peak = 0.0;
    for (double v : spectrum.values) peak = std::max(peak, std::abs(v));
    return kRelativeProminence * peak;
}

std::vector<Extremum> find_extrema(const Spectrum& s, std::optional<double> prominence) {
    const std::size_t n = s.values.size();
    if (n < kMinGridPoints || s.omegas.size() != n)
        throw Error(ErrorCode::grid_too_small, "feature extraction needs at least 5 grid points");
    const double threshold = prominence.value_or(default_prominence(s));
    if (threshold < 0.0) throw Error(ErrorCode::invalid_argument, "prominence must be non-negative");

    // Nonzero first differences; flat runs between them are collapsed to their midpoint.
    struct Slope {
        std::size_t at;
        int sign;
    };
    std::vector<Slope> slopes;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d = s.values[k + 1] - s.values[k];
        if (d > 0.0) slopes.push_back({k, +1});
        else if (d < 0.0) slopes.push_back({k, -1});
    }

    // The grid ends enter the pruning as anchors so that a weak extremum next
    // to a boundary can be removed on its own.
    struct Candidate {
        Extremum e;
        bool anchor;
    };
    std::vector<Candidate> cand;
    auto opposite = [](ExtremumKind k) { return k == ExtremumKind::max ? ExtremumKind::min : ExtremumKind::max; };
    for (std::size_t i = 0; i + 1 < slopes.size(); ++i) {
        if (slopes[i].sign == slopes[i + 1].sign) continue;
        const std::size_t idx = (slopes[i].at + 1 + slopes[i + 1].at) / 2;
        cand.push_back({{idx, s.omegas[idx], s.values[idx], slopes[i].sign > 0 ? ExtremumKind::max : ExtremumKind::min},
                        false});
    }
    if (cand.empty()) return {};
    cand.insert(cand.begin(), {{0, s.omegas.front(), s.values.front(), opposite(cand.front().e.kind)}, true});
    cand.push_back({{n - 1, s.omegas.back(), s.values.back(), opposite(cand.back().e.kind)}, true});

    while (cand.size() > 2) {
        std::size_t weakest = 0;
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
            const double diff = std::abs(cand[i].e.value - cand[i + 1].e.value);
            if (diff < smallest) {
                smallest = diff;
                weakest = i;
            }
        }
        if (smallest >= threshold) break;
        auto first = cand.begin() + static_cast<std::ptrdiff_t>(weakest);
        if (first->anchor) {
            first->e.kind = opposite(first->e.kind);
            cand.erase(first + 1);
        } else if ((first + 1)->anchor) {
            (first + 1)->e.kind = opposite((first + 1)->e.kind);
            cand.erase(first);
        } else {
            cand.erase(first, first + 2);
        }
    }

    std::vector<Extremum> ext;
    for (const auto& c : cand)
        if (!c.anchor) ext.push_back(c.e);
    return ext;
}

double asymmetry(const Spectrum& s) {
    const std::size_t n = s.omegas.size();
    if (n < 2 || s.values.size() != n) throw Error(ErrorCode::grid_too_small, "asymmetry needs a grid");
    const double scale = std::max(std::abs(s.omegas.front()), std::abs(s.omegas.back()));
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(s.omegas[k] + s.omegas[n - 1 - k]) > 1e-9 * scale)
            throw Error(ErrorCode::asymmetric_grid, "asymmetry requires a grid symmetric about omega = 0");
    }

    auto trapezoid = [&](std::size_t lo, std::size_t hi) {
        double acc = 0.0;
        for (std::size_t k = lo; k < hi; ++k)
            acc += 0.5 * (s.values[k] + s.values[k + 1]) * (s.omegas[k + 1] - s.omegas[k]);
        return acc;
    };

    double negative = 0.0;
    double positive = 0.0;
    if (n % 2 == 1) {
        const std::size_t mid = n / 2;
        negative = trapezoid(0, mid);
        positive = trapezoid(mid, n - 1);
    } else {
        const std::size_t hi = n / 2;
        const std::size_t lo = hi - 1;
        const double at_zero = 0.5 * (s.values[lo] + s.values[hi]);
        negative = trapezoid(0, lo) + 0.5 * (s.values[lo] + at_zero) * (0.0 - s.omegas[lo]);
        positive = trapezoid(hi, n - 1) + 0.5 * (at_zero + s.values[hi]) * s.omegas[hi];
    }
    const double total = positive + negative;
    if (total == 0.0) return 0.0;
    return (positive - negative) / total;
}

HoleMetrics hole_metrics(const Spectrum& s, std::optional<double> prominence) {
    const auto ext = find_extrema(s, prominence);
    const auto hole = find_central_hole(ext, grid_step(s));
    if (!hole || std::abs(asymmetry(s)) >= kAsymmetryThreshold) return {};
    return metrics_for(s, ext, *hole);
}

Lineshape classify(const Spectrum& s, const DriveParams& params, std::optional<double> prominence) {
    const auto ext = find_extrema(s, prominence);
    const double step = grid_step(s);
    std::vector<Extremum> maxima;
    for (const auto& e : ext)
        if (e.kind == ExtremumKind::max) maxima.push_back(e);

    if (maxima.size() == 3 && std::abs(maxima[1].omega) <= 2.0 * step * (1.0 + 1e-9))
        return Lineshape::triplet;

    if (maxima.size() == 2 && params.detuning != 0.0) {
        const double near = kSplitNearSteps * step;
        const double separation = std::abs(maxima[1].omega - maxima[0].omega);
        const double needed = 0.5 * std::max(params.big_gamma(), std::abs(params.detuning));
        auto at_centre = [&](const Extremum& e) { return std::abs(e.omega) <= near; };
        auto at_atom = [&](const Extremum& e) { return std::abs(e.omega - params.detuning) <= near; };
        const bool placed = (at_centre(maxima[0]) && at_atom(maxima[1])) ||
                            (at_centre(maxima[1]) && at_atom(maxima[0]));
        if (separation >= needed && placed) return Lineshape::split_doublet;
    }

    const double asym = std::abs(asymmetry(s));
    if (find_central_hole(ext, step) && asym < kAsymmetryThreshold) return Lineshape::hole_burning;

    if (asym >= kAsymmetryThreshold) {
        for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
            if (ext[i].kind == ext[i + 1].kind) continue;
            if (ext[i].omega <= 0.0 && ext[i + 1].omega >= 0.0) return Lineshape::dispersive_center;
        }
    }
    return Lineshape::single_peak;
}

SpectralFeatures analyze(const Spectrum& s, const DriveParams& params, std::optional<double> prominence) {
    SpectralFeatures f;
    f.extrema = find_extrema(s, prominence);
    f.classification = classify(s, params, prominence);
    f.asymmetry = asymmetry(s);
    if (f.classification == Lineshape::hole_burning) {
        const auto hole = find_central_hole(f.extrema, grid_step(s));
        const auto m = metrics_for(s, f.extrema, *hole);
        f.hole_depth = m.depth;
        f.hole_fwhm = m.fwhm;
    }
    return f;
}

}  // namespace fluorospec
