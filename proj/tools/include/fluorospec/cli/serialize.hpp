#pragma once

#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "fluorospec/drive_params.hpp"
#include "fluorospec/spectrum.hpp"

namespace fluorospec::cli {

/// 17 significant digits, "." separator, locale independent.
std::string format_number(double x);

/// `omega,lambda` rows (`omega,lambda,stderr` for Monte Carlo spectra).
void write_csv(std::ostream& os, const Spectrum& s);

/// Columns `omega,lambda0,lambda1,total`.
void write_components_csv(std::ostream& os, const Spectrum& lambda0, const Spectrum& lambda1,
                          const Spectrum& total);

nlohmann::json to_json(const Spectrum& s);
nlohmann::json to_json(const DriveParams& p);
Spectrum spectrum_from_json(const nlohmann::json& j);

/// Writes one JSON document followed by a newline.
void write_json(std::ostream& os, const nlohmann::json& j);

}  // namespace fluorospec::cli
