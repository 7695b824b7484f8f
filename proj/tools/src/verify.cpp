#include "fluorospec/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "fluorospec/bloch.hpp"
#include "fluorospec/cli/serialize.hpp"
#include "fluorospec/dressed.hpp"
#include "fluorospec/error.hpp"
#include "fluorospec/features.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/stochastic.hpp"

namespace fluorospec::cli {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    DriveParams params() {
        return {uniform(0.1, 10.0), uniform(0.0, 200.0), uniform(-400.0, 400.0), uniform(0.0, 400.0)};
    }

private:
    std::mt19937_64 rng_;
};

Check at_most(std::string suite, std::string name, double measured, double threshold, std::string note = {}) {
    return {std::move(suite), std::move(name), measured, threshold, measured <= threshold, std::move(note)};
}

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

double relative_sup(const Spectrum& a, const Spectrum& ref, double window) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        if (std::abs(a.omegas[k]) > window) continue;
        num = std::max(num, std::abs(a.values[k] - ref.values[k]));
        den = std::max(den, std::abs(ref.values[k]));
    }
    return den > 0.0 ? num / den : num;
}

std::vector<Extremum> maxima(const std::vector<Extremum>& ext) {
    std::vector<Extremum> out;
    for (const auto& e : ext)
        if (e.kind == ExtremumKind::max) out.push_back(e);
    return out;
}

std::string label(double value) { return format_number(value); }

std::vector<Check> oracles(const VerifyOptions& o) {
    Draws draws(o.param_seed);
    double resolvent = 0.0;
    double fourier = 0.0;
    for (std::size_t i = 0; i < o.oracle_draws; ++i) {
        const DriveParams p = draws.params();
        const auto omegas = default_grid(p).values();
        const auto exact = spectrum_exact(p, omegas);
        const auto res = spectrum_resolvent(p, omegas);
        const double scale = sup_abs(exact.values);
        resolvent = std::max(resolvent, sup_diff(exact.values, res.values) / (scale > 0.0 ? scale : 1.0));
        const auto win = default_correlation_window(p);
        const auto fs = spectrum_from_correlation(correlation(p, win.tau_max, win.dtau), omegas);
        fourier = std::max(fourier, sup_diff(exact.values, fs.values));
    }
    const std::string draws_note = std::to_string(o.oracle_draws) + " draws";
    return {at_most("oracles", "exact_vs_resolvent_relative", resolvent, o.resolvent_tol, draws_note),
            at_most("oracles", "exact_vs_fourier_absolute", fourier, o.fourier_tol, draws_note)};
}

std::vector<Check> fig1(const VerifyOptions&) {
    std::vector<Check> out;
    {
        const DriveParams p{1.0, 50.0, 0.0, 10.0};
        const auto grid = default_grid(p);
        const auto s = spectrum_exact(p, grid.values());
        const auto f = analyze(s, p);
        const auto m = maxima(f.extrema);
        double offset = kInf;
        if (m.size() == 3)
            offset = std::max(std::abs(m[0].omega + p.rabi), std::abs(m[2].omega - p.rabi)) / grid.step();
        Check c = at_most("fig1", "L10_triplet_sidebands_steps", offset, 2.0,
                          std::string(to_string(f.classification)));
        c.passed = c.passed && f.classification == Lineshape::triplet;
        out.push_back(c);
    }
    for (double l : {50.0, 100.0, 200.0}) {
        const DriveParams p{1.0, 50.0, 0.0, l};
        const auto grid = default_grid(p);
        const auto f = analyze(spectrum_exact(p, grid.values()), p);
        double offset = kInf;
        for (const auto& e : f.extrema)
            if (e.kind == ExtremumKind::min) offset = std::min(offset, std::abs(e.omega) / grid.step());
        Check c = at_most("fig1", "L" + label(l) + "_hole_centre_steps", offset, 1.0,
                          std::string(to_string(f.classification)));
        c.passed = c.passed && f.classification == Lineshape::hole_burning;
        out.push_back(c);
    }
    double worst_ratio = 0.0;
    double previous = kInf;
    std::string widths;
    for (double l : {100.0, 200.0, 400.0}) {
        const DriveParams p{1.0, 50.0, 0.0, l};
        const double w = hole_metrics(spectrum_exact(p, default_grid(p).values())).fwhm;
        widths += (widths.empty() ? "" : " ") + label(w);
        worst_ratio = std::max(worst_ratio, w > 0.0 ? w / previous : kInf);
        previous = w;
    }
    Check c = at_most("fig1", "hole_fwhm_ratio_L100_200_400", worst_ratio, 1.0, "fwhm " + widths);
    c.passed = worst_ratio < 1.0;
    out.push_back(c);
    return out;
}

std::vector<Check> fig3(const VerifyOptions&) {
    std::vector<Check> out;
    for (double d : {100.0, 200.0}) {
        const DriveParams p{1.0, 50.0, d, 200.0};
        const auto f = analyze(spectrum_exact(p, default_grid(p).values()), p);
        Check c{"fig3", "D" + label(d) + "_dispersive_abs_asymmetry", std::abs(f.asymmetry), 0.05, false,
                std::string(to_string(f.classification))};
        c.passed = f.classification == Lineshape::dispersive_center && std::abs(f.asymmetry) > 0.05;
        out.push_back(c);
    }
    {
        const DriveParams p{1.0, 50.0, 400.0, 200.0};
        const auto grid = default_grid(p);
        const auto f = analyze(spectrum_exact(p, grid.values()), p);
        const auto m = maxima(f.extrema);
        double steps = kInf;
        if (m.size() == 2) {
            const double a = std::max(std::abs(m[0].omega), std::abs(m[1].omega - p.detuning));
            const double b = std::max(std::abs(m[1].omega), std::abs(m[0].omega - p.detuning));
            steps = std::min(a, b) / grid.step();
        }
        Check c = at_most("fig3", "D400_split_doublet_steps", steps, 5.0, std::string(to_string(f.classification)));
        c.passed = c.passed && f.classification == Lineshape::split_doublet;
        out.push_back(c);
    }
    return out;
}

std::vector<Check> approx(const VerifyOptions& o) {
    std::vector<double> errors;
    std::string listed;
    for (double l : {100.0, 200.0, 400.0, 800.0}) {
        const DriveParams p{1.0, 5.0, 0.0, l};
        const auto omegas = default_grid(p).values();
        errors.push_back(relative_sup(spectrum_approx_broadband(p, omegas), spectrum_exact(p, omegas),
                                      4.0 * p.big_gamma()));
        listed += (listed.empty() ? "" : " ") + label(errors.back());
    }
    double ratio = 0.0;
    for (std::size_t k = 1; k < errors.size(); ++k) ratio = std::max(ratio, errors[k] / errors[k - 1]);
    Check mono{"approx", "error_ratio_L100_200_400_800", ratio, 1.0, ratio < 1.0, "errors " + listed};
    return {mono, at_most("approx", "L800_relative_error", errors.back(), o.approx_tol)};
}

std::vector<Check> dressed(const VerifyOptions& o) {
    std::vector<Check> out;
    for (double l : {10.0, 50.0, 100.0, 200.0}) {
        const DriveParams p{1.0, 50.0, 0.0, l};
        const auto omegas = default_grid(p).values();
        const double err =
            relative_sup(dressed_total(p, omegas), spectrum_exact(p, omegas), 3.0 * p.big_gamma());
        out.push_back(at_most("dressed", "L" + label(l) + "_relative_error", err, o.dressed_tol));
    }
    const DriveParams p{1.0, 50.0, 0.0, 100.0};
    const double g = p.big_gamma();
    const auto s = lambda0(p, std::vector<double>{0.0, g, -g});
    out.push_back(at_most("dressed", "lambda0_height", std::abs(s.values[0] * 4.0 * g - 1.0), 1e-9));
    out.push_back(at_most("dressed", "lambda0_half_width",
                          std::max(std::abs(s.values[1] / s.values[0] - 0.5), std::abs(s.values[2] / s.values[0] - 0.5)),
                          1e-9));
    return out;
}

std::vector<Check> mollow(const VerifyOptions&) {
    const DriveParams p{1.0, 50.0, 0.0, 0.0};
    const auto grid = default_grid(p);
    const auto s = spectrum_exact(p, grid.values());
    const auto m = maxima(find_extrema(s));
    double steps = kInf;
    double ratio = kInf;
    if (m.size() == 3) {
        steps = std::max({std::abs(m[1].omega), std::abs(m[0].omega + p.rabi), std::abs(m[2].omega - p.rabi)}) /
                grid.step();
        ratio = m[1].value / (0.5 * (m[0].value + m[2].value));
    }
    return {at_most("mollow", "peak_positions_steps", steps, 2.0, std::to_string(m.size()) + " maxima"),
            at_most("mollow", "height_ratio_minus_3", std::abs(ratio - 3.0), 0.3, "ratio " + label(ratio))};
}

std::vector<Check> sumrule(const VerifyOptions& o) {
    const auto base = intensity_budget({1.0, std::numbers::sqrt2, 0.0, 0.0});
    Check norm = at_most("sumrule", "normalisation_rabi_sqrt2", base.relative_error(), o.sumrule_tol,
                         "inelastic " + label(base.inelastic) + " elastic " + label(base.elastic));
    Draws draws(o.param_seed + 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < o.sumrule_draws; ++i) worst = std::max(worst, intensity_budget(draws.params()).relative_error());
    return {norm, at_most("sumrule", "random_draws_relative", worst, o.sumrule_tol,
                          std::to_string(o.sumrule_draws) + " draws")};
}

std::vector<Check> mc(const VerifyOptions& o) {
    const DriveParams p{1.0, 50.0, 0.0, 50.0};
    McTrajectoryOptions opt;
    opt.dt = o.mc_dt;
    opt.realizations = o.realizations;
    opt.seed = o.seed;
    const auto ens = mc_average_trajectory(p, opt);
    const auto det = evolve(BlochState{}, p, opt.t_end, o.mc_dt);

    double worst = 0.0;
    for (std::size_t k = 1; k < ens.times.size(); ++k) {
        // nearest deterministic sample (both integrators use the same step)
        const auto it = std::lower_bound(det.times.begin(), det.times.end(), ens.times[k] - 0.5 * o.mc_dt);
        const double ref = det.states[static_cast<std::size_t>(it - det.times.begin())].sigma_z;
        worst = std::max(worst, std::abs(ens.sigma_z[k].mean - ref) / ens.sigma_z[k].std_error);
    }
    const auto& last = ens.sigma_z.back();
    const double steady = std::abs(last.mean - steady_state(p).sigma_z) / last.std_error;
    const std::string note = "n=" + std::to_string(o.realizations);
    return {at_most("mc", "sigma_z_max_zscore", worst, o.mc_sigmas, note + " samples=20"),
            at_most("mc", "steady_state_zscore", steady, o.mc_sigmas, note)};
}

std::vector<Check> invariants(const VerifyOptions& o) {
    std::vector<Check> out;
    Draws draws(o.param_seed + 2);

    double ball = 0.0;
    for (int i = 0; i < 20; ++i) {
        const DriveParams p = draws.params();
        const double r = draws.uniform(0.0, 1.0);
        const double theta = draws.uniform(0.0, std::numbers::pi);
        const BlochState start{std::polar(0.5 * r * std::sin(theta), draws.uniform(0.0, 6.3)), r * std::cos(theta)};
        const auto traj = evolve(start, p, 2.0 / p.gamma, kStepGuard / p.max_rate(), 5);
        for (const auto& s : traj.states)
            ball = std::max(ball, 4.0 * std::norm(s.sigma_minus) + s.sigma_z * s.sigma_z - 1.0);
    }
    out.push_back(at_most("invariants", "bloch_ball_excess", ball, 1e-6));

    double parity = 0.0;
    double reflection = 0.0;
    for (int i = 0; i < 20; ++i) {
        DriveParams p = draws.params();
        const auto omegas = default_grid(p, 801).values();
        const auto a = spectrum_exact(p, omegas);
        DriveParams q = p;
        q.detuning = -p.detuning;
        const auto b = spectrum_exact(q, omegas);
        p.detuning = 0.0;
        const auto c = spectrum_exact(p, omegas);
        const std::size_t n = omegas.size();
        for (std::size_t k = 0; k < n; ++k) {
            reflection = std::max(reflection, std::abs(a.values[k] - b.values[n - 1 - k]));
            parity = std::max(parity, std::abs(c.values[k] - c.values[n - 1 - k]));
        }
    }
    out.push_back(at_most("invariants", "resonant_parity", parity, 1e-9));
    out.push_back(at_most("invariants", "detuning_reflection", reflection, 1e-9));

    const DriveParams ref{1.0, 50.0, 0.0, 100.0};
    const cplx z{1e-6, 0.0};
    double residue = std::abs(z * laplace_D(ref, z) - elastic_weight(ref));
    for (int i = 0; i < 20; ++i) {
        const DriveParams p = draws.params();
        const cplx zz{1e-8 * slowest_decay_rate(p), 0.0};
        residue = std::max(residue, std::abs(zz * laplace_D(p, zz) - elastic_weight(p)));
    }
    out.push_back(at_most("invariants", "residue_identity", residue, 1e-8));

    {
        const DriveParams p{1.0, 30.0, 10.0, 40.0};
        McTrajectoryOptions opt;
        opt.t_end = 0.2;
        opt.realizations = kMinRealizations;
        opt.seed = o.seed;
        const auto a = mc_average_trajectory(p, opt);
        const auto b = mc_average_trajectory(p, opt);
        double diff = 0.0;
        for (std::size_t k = 0; k < a.times.size(); ++k) {
            diff = std::max(diff, std::abs(a.sigma_z[k].mean - b.sigma_z[k].mean));
            diff = std::max(diff, std::abs(a.sigma_minus[k].mean - b.sigma_minus[k].mean));
        }
        out.push_back(at_most("invariants", "seed_determinism", diff, 0.0));
    }

    double mismatches = 0.0;
    const std::vector<DriveParams> presets{
        {1.0, 50.0, 0.0, 10.0},  {1.0, 50.0, 0.0, 50.0},   {1.0, 50.0, 0.0, 100.0},  {1.0, 50.0, 0.0, 200.0},
        {1.0, 50.0, 50.0, 200.0}, {1.0, 50.0, 100.0, 200.0}, {1.0, 50.0, 200.0, 200.0}, {1.0, 50.0, 400.0, 200.0}};
    for (const auto& p : presets) {
        const Spectrum s = spectrum_exact(p, default_grid(p).values());
        const auto base = analyze(s, p);
        for (double c : {1e-3, 7.0, 1e4}) {
            Spectrum scaled = s;
            for (auto& v : scaled.values) v *= c;
            const auto f = analyze(scaled, p);
            bool same = f.classification == base.classification && f.extrema.size() == base.extrema.size() &&
                        std::abs(f.asymmetry - base.asymmetry) <= 1e-12 &&
                        std::abs(f.hole_depth - c * base.hole_depth) <= 1e-9 * c * std::max(base.hole_depth, 1.0);
            for (std::size_t k = 0; same && k < f.extrema.size(); ++k) same = f.extrema[k].index == base.extrema[k].index;
            mismatches += same ? 0.0 : 1.0;
        }
    }
    out.push_back(at_most("invariants", "classifier_scale_mismatches", mismatches, 0.0, "8 presets x 3 scales"));
    return out;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"oracles", "fig1",    "fig3", "approx",    "dressed",
                                                "mollow",  "sumrule", "mc",   "invariants"};
    return names;
}

std::vector<Check> run_suite(std::string_view suite, const VerifyOptions& o) {
    if (suite == "oracles") return oracles(o);
    if (suite == "fig1") return fig1(o);
    if (suite == "fig3") return fig3(o);
    if (suite == "approx") return approx(o);
    if (suite == "dressed") return dressed(o);
    if (suite == "mollow") return mollow(o);
    if (suite == "sumrule") return sumrule(o);
    if (suite == "mc") return mc(o);
    if (suite == "invariants") return invariants(o);
    if (suite == "all") {
        std::vector<Check> out;
        for (const auto& name : suite_names()) {
            auto part = run_suite(name, o);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    throw Error(ErrorCode::invalid_argument, "unknown verification suite: " + std::string(suite));
}

void print_report(std::ostream& os, const std::vector<Check>& checks) {
    for (const auto& c : checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.suite << '/' << c.name << " measured=" << format_number(c.measured)
           << " threshold=" << format_number(c.threshold);
        if (!c.note.empty()) os << " (" << c.note << ')';
        os << '\n';
    }
}

}  // namespace fluorospec::cli
