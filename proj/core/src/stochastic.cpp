#include "fluorospec/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fluorospec/error.hpp"
#include "fluorospec/parallel.hpp"
#include "fluorospec/rk4.hpp"

namespace fluorospec {

namespace {

constexpr cplx kI{0.0, 1.0};

std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream) {
    return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    auto seq = make_seed(seed, stream);
    return std::mt19937_64(seq);
}

void check_noise_step(const DriveParams& p, double dt) {
    check_step(p, dt);
    if (p.linewidth > 0.0 && dt > 0.01 / p.linewidth * (1.0 + 1e-12))
        throw Error(ErrorCode::step_too_coarse,
                    "step does not resolve the phase noise: need dt <= 0.01 / linewidth");
}

void check_realizations(std::size_t n) {
    if (n < kMinRealizations)
        throw Error(ErrorCode::too_few_realizations,
                    "n below statistical minimum (" + std::to_string(kMinRealizations) + ")");
}

std::size_t steps_for(double span, double dt) {
    return static_cast<std::size_t>(std::max(1.0, std::ceil(span / dt - 1e-9)));
}

// Conditional Bloch equations for one noise realization in the laser
// rotating frame; `drive` is e^{-i phi} at the step midpoint.
BlochState conditional_rhs(const BlochState& s, const DriveParams& p, cplx drive) {
    const cplx d_minus = -cplx{p.gamma, p.detuning} * s.sigma_minus + 0.5 * kI * p.rabi * drive * s.sigma_z;
    const double d_z = -p.gamma_z() * s.sigma_z -
                       2.0 * p.rabi * (std::conj(drive) * s.sigma_minus).imag() - p.gamma_z();
    return {d_minus, d_z};
}

// Regression vector (tr[sigma_- X], tr[sigma_+ X], tr[sigma_z X]) for the
// non-Hermitian X(0) = sigma_- rho(t); tr[X] is conserved and carried separately.
struct Regression {
    cplx minus{};
    cplx plus{};
    cplx z{};

    friend Regression operator+(const Regression& a, const Regression& b) noexcept {
        return {a.minus + b.minus, a.plus + b.plus, a.z + b.z};
    }
    friend Regression operator*(const Regression& a, double s) noexcept {
        return {a.minus * s, a.plus * s, a.z * s};
    }
};

}  // namespace

PhaseNoise::PhaseNoise(double linewidth, double dt, std::uint64_t seed, std::uint64_t stream,
                       unsigned refinement)
    : variance_(2.0 * linewidth * dt) {
    refinement = std::min(refinement, 20u);
    engines_.push_back(make_engine(seed, stream));
    for (unsigned level = 1; level <= refinement; ++level) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), level};
        engines_.emplace_back(seq);
    }
    normals_.resize(engines_.size());
    block_.resize(std::size_t{1} << refinement);
    cursor_ = block_.size();
}

double PhaseNoise::next() {
    if (variance_ == 0.0) return 0.0;
    if (cursor_ == block_.size()) refill();
    return block_[cursor_++];
}

// Breadth-first Brownian bridge: at each level a segment spanning m fine
// steps splits into halves whose left part has mean total / 2 and variance
// (m / 4) * variance_.
void PhaseNoise::refill() {
    std::size_t span = block_.size();
    block_[0] = std::sqrt(variance_ * static_cast<double>(span)) * normals_[0](engines_[0]);
    for (std::size_t level = 1; level < engines_.size(); ++level) {
        const double sd = std::sqrt(0.25 * variance_ * static_cast<double>(span));
        const std::size_t half = span / 2;
        for (std::size_t first = 0; first < block_.size(); first += span) {
            const double total = block_[first];
            const double left = 0.5 * total + sd * normals_[level](engines_[level]);
            block_[first] = left;
            block_[first + half] = total - left;
        }
        span = half;
    }
    cursor_ = 0;
}

PhasePath simulate_phase_path(double linewidth, double dt, std::size_t steps, std::uint64_t seed,
                              std::uint64_t stream) {
    if (!(dt > 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be positive");
    if (steps < 1) throw Error(ErrorCode::invalid_argument, "steps must be at least 1");
    if (!(linewidth >= 0.0)) throw Error(ErrorCode::invalid_params, "linewidth must be non-negative");
    PhaseNoise noise(linewidth, dt, seed, stream);
    PhasePath path{dt, std::vector<double>(steps), seed, stream};
    for (auto& inc : path.increments) inc = noise.next();
    return path;
}

EnsembleEstimate<double> estimate(std::span<const double> samples) {
    EnsembleEstimate<double> out;
    out.n = samples.size();
    if (out.n == 0) return out;
    out.mean = pairwise_sum(samples.data(), out.n) / static_cast<double>(out.n);
    if (out.n < 2) return out;
    std::vector<double> sq(out.n);
    for (std::size_t i = 0; i < out.n; ++i) sq[i] = (samples[i] - out.mean) * (samples[i] - out.mean);
    const double var = pairwise_sum(sq.data(), out.n) / static_cast<double>(out.n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(out.n));
    return out;
}

EnsembleEstimate<cplx> estimate(std::span<const cplx> samples) {
    EnsembleEstimate<cplx> out;
    out.n = samples.size();
    if (out.n == 0) return out;
    out.mean = pairwise_sum(samples.data(), out.n) / static_cast<double>(out.n);
    if (out.n < 2) return out;
    std::vector<double> sq(out.n);
    for (std::size_t i = 0; i < out.n; ++i) sq[i] = std::norm(samples[i] - out.mean);
    const double var = pairwise_sum(sq.data(), out.n) / static_cast<double>(out.n - 1);
    out.std_error = std::sqrt(var / static_cast<double>(out.n));
    return out;
}

McTrajectory mc_average_trajectory(const DriveParams& params, const McTrajectoryOptions& opt) {
    validate(params);
    check_noise_step(params, opt.dt);
    check_realizations(opt.realizations);
    if (!(opt.t_end >= opt.dt)) throw Error(ErrorCode::invalid_argument, "t_end must be at least dt");
    if (opt.samples < 1) throw Error(ErrorCode::invalid_argument, "need at least one sampled time");

    const std::size_t steps = steps_for(opt.t_end, opt.dt);
    const double h = opt.t_end / static_cast<double>(steps);
    const std::size_t n_samples = opt.samples + 1;
    std::vector<std::size_t> sample_step(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s)
        sample_step[s] = static_cast<std::size_t>(std::llround(static_cast<double>(s * steps) /
                                                               static_cast<double>(opt.samples)));

    const std::size_t n = opt.realizations;
    // [sample][realization] so each sampled time reduces over a contiguous span
    std::vector<cplx> coherence(n_samples * n);
    std::vector<double> inversion(n_samples * n);

    parallel_for(n, [&](std::size_t r) {
        PhaseNoise noise(params.linewidth, h, opt.seed, r, opt.noise_refinement);
        BlochState y = opt.initial;
        double phi = 0.0;
        std::size_t next_sample = 0;
        auto record = [&](std::size_t step) {
            while (next_sample < n_samples && sample_step[next_sample] == step) {
                coherence[next_sample * n + r] = std::polar(1.0, phi) * y.sigma_minus;
                inversion[next_sample * n + r] = y.sigma_z;
                ++next_sample;
            }
        };
        record(0);
        for (std::size_t k = 1; k <= steps; ++k) {
            const double inc = noise.next();
            const cplx drive = std::polar(1.0, -(phi + 0.5 * inc));
            y = detail::rk4_step(y, h, [&](const BlochState& s) { return conditional_rhs(s, params, drive); });
            phi += inc;
            record(k);
        }
    });

    McTrajectory out;
    out.times.resize(n_samples);
    out.sigma_minus.resize(n_samples);
    out.sigma_z.resize(n_samples);
    for (std::size_t s = 0; s < n_samples; ++s) {
        out.times[s] = static_cast<double>(sample_step[s]) * h;
        out.sigma_minus[s] = estimate(std::span<const cplx>(coherence.data() + s * n, n));
        out.sigma_z[s] = estimate(std::span<const double>(inversion.data() + s * n, n));
    }
    return out;
}

Spectrum mc_steady_spectrum(const DriveParams& params, std::span<const double> omegas,
                            const McSpectrumOptions& opt) {
    validate(params);
    check_noise_step(params, opt.dt);
    check_realizations(opt.realizations);
    if (opt.batches < 2 || opt.batches > opt.realizations)
        throw Error(ErrorCode::invalid_argument, "batch count must lie in [2, realizations]");
    if (!(opt.tau_max >= opt.dt) || !(opt.t_relax >= opt.dt))
        throw Error(ErrorCode::invalid_argument, "t_relax and tau_max must be at least dt");
    if (opt.t_relax * slowest_decay_rate(params) < 10.0)
        throw Error(ErrorCode::insufficient_relaxation,
                    "t_relax shorter than 10 relaxation times of the averaged dynamics");

    const std::size_t relax_steps = steps_for(opt.t_relax, opt.dt);
    const double h = opt.t_relax / static_cast<double>(relax_steps);
    const std::size_t tau_steps = steps_for(opt.tau_max, h);
    const std::size_t n = opt.realizations;
    const std::size_t batches = opt.batches;
    const double gz = params.gamma_z();
    const double rabi = params.rabi;
    const cplx relax_minus{params.gamma, params.detuning};
    const cplx relax_plus{params.gamma, -params.detuning};

    std::vector<std::vector<cplx>> batch_traces(batches, std::vector<cplx>(tau_steps + 1));
    std::vector<double> relaxed_inversion(n);

    parallel_for(batches, [&](std::size_t b) {
        const std::size_t lo = b * n / batches;
        const std::size_t hi = (b + 1) * n / batches;
        auto& acc = batch_traces[b];
        for (std::size_t r = lo; r < hi; ++r) {
            PhaseNoise noise(params.linewidth, h, opt.seed, r, opt.noise_refinement);
            BlochState y{};
            double phi = 0.0;
            for (std::size_t k = 0; k < relax_steps; ++k) {
                const double inc = noise.next();
                const cplx drive = std::polar(1.0, -(phi + 0.5 * inc));
                y = detail::rk4_step(y, h, [&](const BlochState& s) { return conditional_rhs(s, params, drive); });
                phi += inc;
            }
            relaxed_inversion[r] = y.sigma_z;

            const cplx trace_x = y.sigma_minus;
            Regression x{0.0, 0.5 * (1.0 + y.sigma_z), -y.sigma_minus};
            const double phi0 = phi;
            acc[0] += x.plus;
            for (std::size_t k = 1; k <= tau_steps; ++k) {
                const double inc = noise.next();
                const cplx drive = std::polar(1.0, -(phi + 0.5 * inc));
                const cplx drive_c = std::conj(drive);
                x = detail::rk4_step(x, h, [&](const Regression& v) -> Regression {
                    return {-relax_minus * v.minus + 0.5 * kI * rabi * drive * v.z,
                            -relax_plus * v.plus - 0.5 * kI * rabi * drive_c * v.z,
                            -gz * v.z + kI * rabi * (drive_c * v.minus - drive * v.plus) - gz * trace_x};
                });
                phi += inc;
                acc[k] += std::polar(1.0, -(phi - phi0)) * x.plus;
            }
        }
        const double count = static_cast<double>(hi - lo);
        for (auto& v : acc) v /= count;
    });

    const BlochState ss = steady_state(params);
    const auto relaxed = estimate(std::span<const double>(relaxed_inversion));
    if (std::abs(relaxed.mean - ss.sigma_z) > 5.0 * relaxed.std_error + 1e-3)
        throw Error(ErrorCode::insufficient_relaxation,
                    "ensemble inversion at t_relax has not reached the stationary value");

    const double elastic = std::norm(ss.sigma_minus);
    std::vector<std::vector<double>> batch_spectra(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        for (auto& v : batch_traces[b]) v -= elastic;
        batch_spectra[b] = trapezoid_transform(batch_traces[b], h, omegas);
    }

    Spectrum out;
    out.method = Method::monte_carlo;
    out.omegas.assign(omegas.begin(), omegas.end());
    out.values.resize(omegas.size());
    out.stderrs.resize(omegas.size());
    out.elastic_weight = elastic;
    std::vector<double> column(batches);
    for (std::size_t j = 0; j < omegas.size(); ++j) {
        for (std::size_t b = 0; b < batches; ++b) column[b] = batch_spectra[b][j];
        const auto e = estimate(std::span<const double>(column));
        out.values[j] = e.mean;
        out.stderrs[j] = e.std_error;
    }
    return out;
}

}  // namespace fluorospec
