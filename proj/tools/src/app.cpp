#include "fluorospec/cli/app.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "fluorospec/bloch.hpp"
#include "fluorospec/cli/serialize.hpp"
#include "fluorospec/cli/verify.hpp"
#include "fluorospec/dressed.hpp"
#include "fluorospec/error.hpp"
#include "fluorospec/features.hpp"
#include "fluorospec/grid.hpp"
#include "fluorospec/spectrum.hpp"
#include "fluorospec/stochastic.hpp"

namespace fluorospec::cli {

namespace {

// Raised for configuration problems detected by the CLI itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void report_error(std::ostream& err, std::string_view code, std::string_view message) {
    err << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

struct RateArgs {
    double gamma = 1.0;
    double rabi = 0.0;
    double detuning = 0.0;
    double linewidth = 0.0;

    DriveParams params() const { return {gamma, rabi, detuning, linewidth}; }
};

struct GridArgs {
    std::optional<double> omega_min;
    std::optional<double> omega_max;
    std::size_t points = kDefaultGridPoints;
};

struct McArgs {
    std::optional<std::size_t> n;
    std::optional<double> dt;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_relax;
    std::optional<double> tau_max;

    bool any() const { return n || dt || seed || t_relax || tau_max; }
};

void add_rates(CLI::App* cmd, RateArgs& r) {
    cmd->add_option("--gamma", r.gamma, "spontaneous decay rate; other rates and frequencies share its unit")
        ->capture_default_str();
    cmd->add_option("--rabi", r.rabi, "Rabi frequency")->capture_default_str();
    cmd->add_option("--detuning", r.detuning, "atom minus laser frequency")->capture_default_str();
    cmd->add_option("--linewidth", r.linewidth, "laser phase-diffusion bandwidth")->capture_default_str();
}

void add_grid(CLI::App* cmd, GridArgs& g) {
    cmd->add_option("--omega-min", g.omega_min, "lower grid edge (default: -4 max(Gamma, sqrt(Omega^2 + Delta^2)))");
    cmd->add_option("--omega-max", g.omega_max, "upper grid edge");
    cmd->add_option("--points", g.points, "grid points")->capture_default_str();
}

void add_format(CLI::App* cmd, std::string& format) {
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
}

// Absolute-unit grid; the default spans the structures of the reduced problem.
std::vector<double> absolute_grid(const GridArgs& g, const DriveParams& p) {
    if (g.points < 5) throw UsageError("points must be at least 5");
    if (g.omega_min.has_value() != g.omega_max.has_value())
        throw UsageError("--omega-min and --omega-max must be given together");
    if (g.omega_min) {
        if (!(*g.omega_min < *g.omega_max)) throw UsageError("omega-min must be below omega-max");
        return FrequencyGrid{*g.omega_min, *g.omega_max, g.points}.values();
    }
    const double half = p.gamma * default_grid_halfwidth(p.reduced());
    return FrequencyGrid{-half, half, g.points}.values();
}

bool symmetric(const std::vector<double>& omegas) {
    const std::size_t n = omegas.size();
    const double scale = std::max(std::abs(omegas.front()), std::abs(omegas.back()));
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(omegas[k] + omegas[n - 1 - k]) > 1e-9 * scale) return false;
    return true;
}

std::vector<double> scaled(const std::vector<double>& v, double factor) {
    std::vector<double> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [factor](double x) { return x * factor; });
    return out;
}

// Evaluates in units of gamma and converts back: Lambda carries one inverse rate.
Spectrum compute(const std::string& method, const DriveParams& abs_params, const std::vector<double>& omegas,
                 const McArgs& mc) {
    validate(abs_params);
    const double g = abs_params.gamma;
    const DriveParams p = abs_params.reduced();
    const auto w = scaled(omegas, 1.0 / g);

    Spectrum s;
    if (method == "exact") {
        s = spectrum_exact(p, w);
    } else if (method == "resolvent") {
        s = spectrum_resolvent(p, w);
    } else if (method == "approx") {
        s = spectrum_approx_broadband(p, w);
    } else if (method == "dressed") {
        s = dressed_total(p, w);
    } else if (method == "fourier") {
        const auto win = default_correlation_window(p);
        s = spectrum_from_correlation(correlation(p, win.tau_max, win.dtau), w);
    } else {
        McSpectrumOptions opt;
        if (mc.n) opt.realizations = *mc.n;
        if (mc.seed) opt.seed = *mc.seed;
        if (mc.dt) opt.dt = *mc.dt * g;
        if (mc.t_relax) opt.t_relax = *mc.t_relax * g;
        if (mc.tau_max) opt.tau_max = *mc.tau_max * g;
        opt.batches = std::min(opt.batches, opt.realizations);
        s = mc_steady_spectrum(p, w, opt);
    }
    s.omegas = omegas;
    s.values = scaled(s.values, 1.0 / g);
    s.stderrs = scaled(s.stderrs, 1.0 / g);
    return s;
}

std::string classification_label(const Spectrum& s, const DriveParams& p, std::size_t* extrema) {
    const bool flat = std::all_of(s.values.begin(), s.values.end(), [](double v) { return v == 0.0; });
    const auto ext = find_extrema(s);
    *extrema = ext.size();
    if (flat) return "FLAT";
    if (!symmetric(s.omegas)) return "UNCLASSIFIED";
    return std::string(to_string(classify(s, p.reduced())));
}

class Output {
public:
    explicit Output(const std::string& path, std::ostream& fallback) {
        if (path.empty()) {
            os_ = &fallback;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) throw UsageError("cannot open output file: " + path);
        os_ = &file_;
    }

    std::ostream& stream() { return *os_; }

    void close() {
        if (file_.is_open()) {
            file_.close();
            if (!file_) throw UsageError("failed writing output file");
        }
    }

private:
    std::ofstream file_;
    std::ostream* os_ = nullptr;
};

void emit_spectrum(std::ostream& os, const std::string& format, const Spectrum& s, const DriveParams& p) {
    if (format == "csv") {
        write_csv(os, s);
        return;
    }
    auto j = to_json(s);
    j["params"] = to_json(p);
    write_json(os, j);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

// Flat `key = value` lines become `--key value`; '#' starts a comment.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read config file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front())
            value = value.substr(1, value.size() - 2);
        if (key.empty() || key == "config")
            throw UsageError(path + ":" + std::to_string(lineno) + ": invalid key");
        std::replace(key.begin(), key.end(), '_', '-');
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

// Splices the config file of `spectrum` or `sweep` in front of the explicit flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a == "spectrum" || a == "sweep"; });
    if (sub == args.end()) return args;
    std::vector<std::string> head(args.begin(), sub + 1);
    std::vector<std::string> rest;
    std::vector<std::string> from_file;
    for (auto it = sub + 1; it != args.end(); ++it) {
        std::string path;
        if (*it == "--config") {
            if (std::next(it) == args.end()) throw UsageError("--config needs a path");
            path = *++it;
        } else if (it->rfind("--config=", 0) == 0) {
            path = it->substr(9);
        } else {
            rest.push_back(*it);
            continue;
        }
        const auto t = config_tokens(path);
        from_file.insert(from_file.end(), t.begin(), t.end());
    }
    head.insert(head.end(), from_file.begin(), from_file.end());
    head.insert(head.end(), rest.begin(), rest.end());
    return head;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

struct FigurePanel {
    std::string name;
    DriveParams params;
};

std::vector<FigurePanel> figure_panels(int id) {
    std::vector<FigurePanel> out;
    const char letters[] = {'a', 'b', 'c', 'd'};
    if (id == 1 || id == 4) {
        const double widths[] = {10.0, 50.0, 100.0, 200.0};
        for (int k = 0; k < 4; ++k)
            out.push_back({"fig" + std::to_string(id) + letters[k], {1.0, 50.0, 0.0, widths[k]}});
    } else if (id == 3) {
        const double detunings[] = {50.0, 100.0, 200.0, 400.0};
        for (int k = 0; k < 4; ++k) out.push_back({std::string("fig3") + letters[k], {1.0, 50.0, detunings[k], 200.0}});
    }
    return out;
}

int cmd_figure(int id, const std::string& dir, const std::string& format, std::size_t points, std::ostream& out) {
    if (id < 1 || id > 4) throw UsageError("unknown figure id " + std::to_string(id) + " (expected 1-4)");
    if (points < 5) throw UsageError("points must be at least 5");
    std::filesystem::create_directories(dir);
    const std::string ext = format == "csv" ? ".csv" : ".json";

    if (id == 2) {
        // 50 steps over [0, 200] on the grid of the broadest panel
        const DriveParams widest{1.0, 50.0, 0.0, 200.0};
        const auto omegas = default_grid(widest, points).values();
        const std::string path = join_path(dir, "fig2" + ext);
        Output file(path, out);
        nlohmann::json rows = nlohmann::json::array();
        if (format == "csv") file.stream() << "linewidth,omega,lambda\n";
        for (int k = 0; k <= 50; ++k) {
            const DriveParams p{1.0, 50.0, 0.0, 4.0 * k};
            const auto s = spectrum_exact(p, omegas);
            if (format == "csv") {
                for (std::size_t i = 0; i < omegas.size(); ++i)
                    file.stream() << format_number(p.linewidth) << ',' << format_number(omegas[i]) << ','
                                  << format_number(s.values[i]) << '\n';
            } else {
                rows.push_back({{"linewidth", p.linewidth}, {"values", s.values}});
            }
        }
        if (format == "json") write_json(file.stream(), {{"omegas", omegas}, {"panels", rows}});
        file.close();
        out << "fig2 rows=" << 51 * omegas.size() << " file=" << path << '\n';
        return kExitOk;
    }

    for (const auto& panel : figure_panels(id)) {
        const auto omegas = default_grid(panel.params, points).values();
        const std::string path = join_path(dir, panel.name + ext);
        Output file(path, out);
        std::string summary;
        if (id == 4) {
            const auto l0 = lambda0(panel.params, omegas);
            const auto l1 = lambda1(panel.params, omegas);
            const auto total = dressed_total(panel.params, omegas);
            if (format == "csv") {
                write_components_csv(file.stream(), l0, l1, total);
            } else {
                write_json(file.stream(), {{"params", to_json(panel.params)},
                                           {"omegas", omegas},
                                           {"lambda0", l0.values},
                                           {"lambda1", l1.values},
                                           {"total", total.values}});
            }
            summary = "classification=" + std::string(to_string(classify(total, panel.params)));
        } else {
            const auto s = spectrum_exact(panel.params, omegas);
            emit_spectrum(file.stream(), format, s, panel.params);
            const auto f = analyze(s, panel.params);
            summary = "classification=" + std::string(to_string(f.classification)) +
                      " asymmetry=" + format_number(f.asymmetry);
        }
        file.close();
        out << panel.name << " linewidth=" << format_number(panel.params.linewidth)
            << " detuning=" << format_number(panel.params.detuning) << ' ' << summary << " file=" << path << '\n';
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Resonance fluorescence spectra of a two-level atom driven by a phase-diffusing laser",
                 "fluorospec"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "expand all help");

    // spectrum
    RateArgs rates;
    GridArgs grid;
    McArgs mc;
    std::string method = "exact";
    std::string format = "csv";
    std::string output;
    auto* spectrum = app.add_subcommand("spectrum", "compute one spectrum");
    spectrum->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    spectrum->add_option("--config", "flat key = value file; flags override it");
    add_rates(spectrum, rates);
    add_grid(spectrum, grid);
    spectrum->add_option("--method", method, "evaluator")
        ->check(CLI::IsMember({"exact", "resolvent", "approx", "dressed", "fourier", "mc"}))
        ->capture_default_str();
    add_format(spectrum, format);
    spectrum->add_option("--output", output, "output file (default: standard output)");
    spectrum->add_option("--n", mc.n, "Monte Carlo realizations (mc only)");
    spectrum->add_option("--dt", mc.dt, "Monte Carlo time step (mc only)");
    spectrum->add_option("--seed", mc.seed, "Monte Carlo seed (mc only)");
    spectrum->add_option("--t-relax", mc.t_relax, "Monte Carlo relaxation time (mc only)");
    spectrum->add_option("--tau-max", mc.tau_max, "Monte Carlo correlation window (mc only)");

    // figure
    int figure_id = 0;
    std::string figure_dir = ".";
    std::string figure_format = "csv";
    std::size_t figure_points = kDefaultGridPoints;
    auto* figure = app.add_subcommand("figure", "write the data behind figure 1, 2, 3 or 4");
    figure->add_option("id", figure_id, "figure number")->required();
    figure->add_option("--output-dir", figure_dir, "directory for the panel files")->capture_default_str();
    figure->add_option("--points", figure_points, "grid points per panel")->capture_default_str();
    add_format(figure, figure_format);

    // verify
    std::string suite;
    VerifyOptions vopt;
    std::optional<std::size_t> verify_n;
    auto* verify = app.add_subcommand("verify", "run verification suites");
    std::vector<std::string> suites = suite_names();
    suites.push_back("all");
    verify->add_option("suite", suite, "suite name")->required()->check(CLI::IsMember(suites));
    verify->add_option("--n", verify_n, "Monte Carlo realizations");
    verify->add_option("--dt", vopt.mc_dt, "Monte Carlo time step")->capture_default_str();
    verify->add_option("--seed", vopt.seed, "Monte Carlo seed")->capture_default_str();
    verify->add_option("--param-seed", vopt.param_seed, "seed of the random parameter draws")->capture_default_str();
    verify->add_option("--draws", vopt.oracle_draws, "random parameter sets for the oracle suite")->capture_default_str();
    verify->add_option("--resolvent-tol", vopt.resolvent_tol)->capture_default_str();
    verify->add_option("--fourier-tol", vopt.fourier_tol)->capture_default_str();
    verify->add_option("--sumrule-tol", vopt.sumrule_tol)->capture_default_str();
    verify->add_option("--dressed-tol", vopt.dressed_tol)->capture_default_str();
    verify->add_option("--approx-tol", vopt.approx_tol)->capture_default_str();
    verify->add_option("--mc-sigmas", vopt.mc_sigmas, "allowed standard errors")->capture_default_str();

    // sweep
    RateArgs sweep_rates;
    GridArgs sweep_grid;
    std::string sweep_param;
    std::vector<double> sweep_values;
    std::string sweep_method = "exact";
    std::string sweep_format = "csv";
    std::string sweep_output;
    auto* sweep = app.add_subcommand("sweep", "tabulate spectral features over one parameter");
    sweep->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    sweep->add_option("--config", "flat key = value file; flags override it");
    sweep->add_option("--param", sweep_param, "parameter to vary")
        ->required()
        ->check(CLI::IsMember({"linewidth", "rabi", "detuning", "gamma"}));
    sweep->add_option("--values", sweep_values, "comma separated values")
        ->required()
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("--method", sweep_method, "evaluator")
        ->check(CLI::IsMember({"exact", "resolvent", "approx", "dressed", "fourier"}))
        ->capture_default_str();
    add_rates(sweep, sweep_rates);
    add_grid(sweep, sweep_grid);
    add_format(sweep, sweep_format);
    sweep->add_option("--output", sweep_output, "output file (default: standard output)");

    try {
        std::vector<std::string> expanded;
        try {
            expanded = expand_config(args);
        } catch (const UsageError& e) {
            report_error(err, "usage", e.what());
            return kExitUsage;
        }
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (spectrum->parsed()) {
            if (mc.any() && method != "mc") throw UsageError("Monte Carlo options require --method mc");
            const DriveParams p = rates.params();
            validate(p);
            const auto omegas = absolute_grid(grid, p);
            const Spectrum s = compute(method, p, omegas, mc);
            Output file(output, out);
            emit_spectrum(file.stream(), format, s, p);
            file.close();
            std::size_t n_ext = 0;
            const std::string cls = classification_label(s, p, &n_ext);
            std::ostream& summary = output.empty() ? err : out;
            summary << "classification=" << cls << " elastic_weight=" << format_number(s.elastic_weight)
                    << " extrema=" << n_ext << " points=" << s.omegas.size() << " method=" << to_string(s.method)
                    << " in_regime=" << (s.in_regime ? "true" : "false") << '\n';
            return kExitOk;
        }
        if (figure->parsed()) return cmd_figure(figure_id, figure_dir, figure_format, figure_points, out);
        if (verify->parsed()) {
            if (verify_n) {
                if (*verify_n < kMinRealizations)
                    throw Error(ErrorCode::too_few_realizations,
                                "n below statistical minimum (" + std::to_string(kMinRealizations) + ")");
                vopt.realizations = *verify_n;
            }
            const auto checks = run_suite(suite, vopt);
            print_report(out, checks);
            const auto passed = std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
            out << "verify " << suite << ": " << passed << '/' << checks.size() << " checks passed\n";
            return passed == static_cast<std::ptrdiff_t>(checks.size()) ? kExitOk : kExitVerifyFailed;
        }
        if (sweep->parsed()) {
            if (sweep_values.empty()) throw UsageError("--values needs at least one value");
            Output file(sweep_output, out);
            nlohmann::json rows = nlohmann::json::array();
            if (sweep_format == "csv")
                file.stream() << sweep_param << ",classification,hole_depth,hole_fwhm,asymmetry,elastic_weight\n";
            for (double v : sweep_values) {
                RateArgs r = sweep_rates;
                if (sweep_param == "linewidth") r.linewidth = v;
                if (sweep_param == "rabi") r.rabi = v;
                if (sweep_param == "detuning") r.detuning = v;
                if (sweep_param == "gamma") r.gamma = v;
                const DriveParams p = r.params();
                validate(p);
                const auto omegas = absolute_grid(sweep_grid, p);
                if (!symmetric(omegas)) throw UsageError("sweep needs a grid symmetric about omega = 0");
                const Spectrum s = compute(sweep_method, p, omegas, {});
                const auto f = analyze(s, p.reduced());
                const std::string cls = std::all_of(s.values.begin(), s.values.end(), [](double x) { return x == 0.0; })
                                            ? "FLAT"
                                            : std::string(to_string(f.classification));
                if (sweep_format == "csv") {
                    file.stream() << format_number(v) << ',' << cls << ',' << format_number(f.hole_depth) << ','
                                  << format_number(f.hole_fwhm) << ',' << format_number(f.asymmetry) << ','
                                  << format_number(s.elastic_weight) << '\n';
                } else {
                    rows.push_back({{sweep_param, v},
                                    {"classification", cls},
                                    {"hole_depth", f.hole_depth},
                                    {"hole_fwhm", f.hole_fwhm},
                                    {"asymmetry", f.asymmetry},
                                    {"elastic_weight", s.elastic_weight}});
                }
            }
            if (sweep_format == "json") write_json(file.stream(), rows);
            file.close();
            (sweep_output.empty() ? err : out) << "sweep " << sweep_param << " rows=" << sweep_values.size() << '\n';
            return kExitOk;
        }
    } catch (const Error& e) {
        report_error(err, to_string(e.code()), e.what());
        return kExitUsage;
    } catch (const UsageError& e) {
        report_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const std::filesystem::filesystem_error& e) {
        report_error(err, "io", e.what());
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace fluorospec::cli
