#include "fluorospec/cli/serialize.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace fluorospec::cli {

std::string format_number(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    if (res.ec != std::errc{}) throw std::runtime_error("number formatting failed");
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const Spectrum& s) {
    const bool with_errors = s.stderrs.size() == s.values.size() && !s.stderrs.empty();
    os << (with_errors ? "omega,lambda,stderr\n" : "omega,lambda\n");
    for (std::size_t k = 0; k < s.omegas.size(); ++k) {
        os << format_number(s.omegas[k]) << ',' << format_number(s.values[k]);
        if (with_errors) os << ',' << format_number(s.stderrs[k]);
        os << '\n';
    }
}

void write_components_csv(std::ostream& os, const Spectrum& lambda0, const Spectrum& lambda1,
                          const Spectrum& total) {
    os << "omega,lambda0,lambda1,total\n";
    for (std::size_t k = 0; k < total.omegas.size(); ++k) {
        os << format_number(total.omegas[k]) << ',' << format_number(lambda0.values[k]) << ','
           << format_number(lambda1.values[k]) << ',' << format_number(total.values[k]) << '\n';
    }
}

nlohmann::json to_json(const Spectrum& s) {
    nlohmann::json j;
    j["method"] = std::string(to_string(s.method));
    j["elastic_weight"] = s.elastic_weight;
    j["in_regime"] = s.in_regime;
    j["omegas"] = s.omegas;
    j["values"] = s.values;
    if (!s.stderrs.empty()) j["stderrs"] = s.stderrs;
    return j;
}

nlohmann::json to_json(const DriveParams& p) {
    return {{"gamma", p.gamma}, {"rabi", p.rabi}, {"detuning", p.detuning}, {"linewidth", p.linewidth}};
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
    Spectrum s;
    const auto method = j.at("method").get<std::string>();
    bool known = false;
    for (Method m : {Method::exact, Method::resolvent, Method::approx, Method::dressed, Method::fourier,
                     Method::monte_carlo}) {
        if (to_string(m) == method) {
            s.method = m;
            known = true;
        }
    }
    if (!known) throw std::runtime_error("unknown method tag: " + method);
    s.elastic_weight = j.at("elastic_weight").get<double>();
    s.in_regime = j.at("in_regime").get<bool>();
    s.omegas = j.at("omegas").get<std::vector<double>>();
    s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("stderrs")) s.stderrs = j.at("stderrs").get<std::vector<double>>();
    return s;
}

void write_json(std::ostream& os, const nlohmann::json& j) { os << j.dump() << '\n'; }

}  // namespace fluorospec::cli
