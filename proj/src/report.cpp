#include "fluxvol/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fluxvol {

std::string format17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_profile_csv(std::ostream& out, const std::vector<VolumeProfile>& profiles) {
  out << "method,region,Psi,dVdPsi,V_cum\n";
  for (const auto& p : profiles) {
    const std::string m(to_string(p.method));
    const std::string r(to_string(p.region));
    for (const auto& row : p.rows) {
      out << m << ',' << r << ',' << format17(row.Psi) << ',' << format17(row.dVdPsi) << ','
          << format17(row.V_cum) << '\n';
    }
  }
}

nlohmann::json profile_metadata(const RunConfig& cfg,
                                const std::vector<VolumeProfile>& profiles) {
  nlohmann::json j;
  j["version"] = kVersion;
  nlohmann::json conf = nlohmann::json::object();
  for (const auto& [k, v] : to_key_values(cfg)) conf[k] = v;
  j["config"] = conf;
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : profiles) {
    nlohmann::json e;
    e["method"] = std::string(to_string(p.method));
    e["region"] = std::string(to_string(p.region));
    e["total"] = format17(p.total());
    e["rows"] = p.rows.size();
    nlohmann::json prov = nlohmann::json::object();
    for (const auto& [k, v] : p.provenance) prov[k] = v;
    e["provenance"] = prov;
    list.push_back(e);
  }
  j["profiles"] = list;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("error writing '" + path + "'");
}

}  // namespace fluxvol
