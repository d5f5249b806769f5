#pragma once

// CSV and JSON output. Numbers are written with 17 significant digits so
// that identical runs give byte-identical files.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxvol/config.hpp"
#include "fluxvol/volume.hpp"

namespace fluxvol {

inline constexpr const char* kVersion = "0.1.0";

std::string format17(double v);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

/// Header `method,region,Psi,dVdPsi,V_cum`, one line per profile row.
void write_profile_csv(std::ostream& out, const std::vector<VolumeProfile>& profiles);

nlohmann::json profile_metadata(const RunConfig& cfg,
                                const std::vector<VolumeProfile>& profiles);

/// Writes `text` to `path`, throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace fluxvol
