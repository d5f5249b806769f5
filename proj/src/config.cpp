#include "fluxvol/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace fluxvol {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& v)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto dbl = [](double RunConfig::*m) {
      return [m](RunConfig& c, const std::string& k, const std::string& v) {
        c.*m = to_double(k, v);
      };
    };
    t["field"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v != "axisym" && v != "helical") throw ConfigError(k, "unknown field model '" + v + "'");
      c.field = v;
    };
    t["axisym.C"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.axisym.C = to_double(k, v);
    };
    t["axisym.r0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.axisym.r0 = to_double(k, v);
    };
    t["helical.w1"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.w1 = to_double(k, v);
    };
    t["helical.w2"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.w2 = to_double(k, v);
    };
    t["helical.B0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.B0 = to_double(k, v);
    };
    t["helical.R0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.R0 = to_double(k, v);
    };
    t["helical.m"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.m = static_cast<int>(to_int(k, v));
    };
    t["helical.n"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.n = static_cast<int>(to_int(k, v));
    };
    t["helical.eps"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.eps = to_double(k, v);
    };
    t["helical.zeta"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.helical.zeta = to_double(k, v);
    };
    t["helical.f"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      Polynomial p;
      for (const auto& item : split_list(v)) p.coeffs.push_back(to_double(k, item));
      if (p.coeffs.empty()) throw ConfigError(k, "needs at least one coefficient");
      c.helical.f = p;
    };
    t["method"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      std::vector<Method> ms;
      for (const auto& item : split_list(v)) {
        ms.push_back(wrap(k, [&] { return method_from_string(item); }));
      }
      if (ms.empty()) throw ConfigError(k, "needs at least one method");
      c.methods = ms;
    };
    t["region"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.region = wrap(k, [&] { return region_from_string(v); });
    };
    t["psi1"] = dbl(&RunConfig::psi1);
    t["psi2"] = dbl(&RunConfig::psi2);
    t["n"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.n = static_cast<int>(to_int(k, v));
    };
    t["grid.x0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.x0 = to_double(k, v);
    };
    t["grid.y0"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.y0 = to_double(k, v);
    };
    t["grid.L1"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.L1 = to_double(k, v);
    };
    t["grid.L2"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.L2 = to_double(k, v);
    };
    t["grid.N1"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.N1 = static_cast<int>(to_int(k, v));
    };
    t["grid.N2"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.grid.N2 = static_cast<int>(to_int(k, v));
    };
    t["grid.nodes"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "centred") {
        c.grid.placement = NodePlacement::CellCentred;
      } else if (v == "endpoints") {
        c.grid.placement = NodePlacement::Endpoints;
      } else {
        throw ConfigError(k, "expected centred or endpoints, got '" + v + "'");
      }
    };
    t["n_contour"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.n_contour = static_cast<int>(to_int(k, v));
    };
    t["q"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.q = static_cast<int>(to_int(k, v));
    };
    t["n_avg"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.n_avg = static_cast<int>(to_int(k, v));
    };
    t["unit_density"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.unit_density = to_bool(k, v);
    };
    t["tracer.rel_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.tracer.rel_tol = to_double(k, v);
    };
    t["tracer.abs_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.tracer.abs_tol = to_double(k, v);
    };
    t["tracer.max_time"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.tracer.max_time = to_double(k, v);
    };
    t["tracer.max_step"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.tracer.max_step = to_double(k, v);
    };
    t["uline.filter_valid"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.uline.filter_valid = to_bool(k, v);
    };
    t["uline.count"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.uline.count_required = static_cast<int>(to_int(k, v));
    };
    t["uline.match_tol"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.method.uline.match_tol = to_double(k, v);
    };
    t["clip"] = dbl(&RunConfig::clip);
    t["endpoint"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "extrapolate") {
        c.endpoint = EndpointPolicy::Extrapolate;
      } else if (v == "direct") {
        c.endpoint = EndpointPolicy::Direct;
      } else {
        throw ConfigError(k, "expected extrapolate or direct, got '" + v + "'");
      }
    };
    t["add_enclosed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.add_enclosed = to_bool(k, v);
    };
    t["output"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output = v; };
    t["metadata"] = [](RunConfig& c, const std::string&, const std::string& v) {
      c.metadata = v;
    };
    t["seed"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const long long s = to_int(k, v);
      if (s < 0) throw ConfigError(k, "must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    };
    t["threads"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      const long long n = to_int(k, v);
      if (n < 0) throw ConfigError(k, "must be non-negative");
      c.threads = static_cast<unsigned>(n);
    };
    t["strict"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.strict = to_bool(k, v);
    };
    return t;
  }();
  return table;
}

}  // namespace

void RunConfig::validate() const {
  if (field == "axisym") {
    wrap("axisym", [&] { return AxisymField(axisym), 0; });
  } else {
    wrap("helical", [&] { return HelicalField(helical), 0; });
  }
  if (n < 1) throw ConfigError("n", "must be >= 1");
  if (method.n_contour < 3) throw ConfigError("n_contour", "must be >= 3");
  if (method.q < 2) throw ConfigError("q", "must be >= 2");
  if (method.n_avg < 1) throw ConfigError("n_avg", "must be >= 1");
  if (!(method.tracer.rel_tol > 0.0)) throw ConfigError("tracer.rel_tol", "must be > 0");
  if (!(method.tracer.abs_tol > 0.0)) throw ConfigError("tracer.abs_tol", "must be > 0");
  if (!(method.tracer.max_step > 0.0)) throw ConfigError("tracer.max_step", "must be > 0");
  if (method.uline.count_required < 1) throw ConfigError("uline.count", "must be >= 1");
  wrap("grid", [&] { return grid.validate(), 0; });
  for (Method m : methods) {
    if (m == Method::Thm1 && field != "axisym") {
      throw ConfigError("method", "thm1 needs the axisymmetric field");
    }
  }
  if (field == "axisym" && region != Region::Inner) {
    throw ConfigError("region", "the axisymmetric field has only the inner region");
  }
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

RunConfig apply_key_values(const KeyValues& kv, RunConfig base) {
  const auto& table = setters();
  for (const auto& [key, value] : kv) {
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(base, key, value);
  }
  return base;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) {
    throw ConfigError(assignment, "override must have the form key=value");
  }
  cfg = apply_key_values({{trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1))}},
                         cfg);
}

KeyValues to_key_values(const RunConfig& c) {
  KeyValues kv;
  kv["field"] = c.field;
  kv["axisym.C"] = format_double(c.axisym.C);
  kv["axisym.r0"] = format_double(c.axisym.r0);
  kv["helical.w1"] = format_double(c.helical.w1);
  kv["helical.w2"] = format_double(c.helical.w2);
  kv["helical.B0"] = format_double(c.helical.B0);
  kv["helical.R0"] = format_double(c.helical.R0);
  kv["helical.m"] = std::to_string(c.helical.m);
  kv["helical.n"] = std::to_string(c.helical.n);
  kv["helical.eps"] = format_double(c.helical.eps);
  kv["helical.zeta"] = format_double(c.helical.zeta);
  std::string f;
  for (std::size_t i = 0; i < c.helical.f.coeffs.size(); ++i) {
    if (i) f += ", ";
    f += format_double(c.helical.f.coeffs[i]);
  }
  kv["helical.f"] = f;
  std::string ms;
  for (std::size_t i = 0; i < c.methods.size(); ++i) {
    if (i) ms += ", ";
    ms += to_string(c.methods[i]);
  }
  kv["method"] = ms;
  kv["region"] = std::string(to_string(c.region));
  kv["psi1"] = format_double(c.psi1);
  kv["psi2"] = format_double(c.psi2);
  kv["n"] = std::to_string(c.n);
  kv["grid.x0"] = format_double(c.grid.x0);
  kv["grid.y0"] = format_double(c.grid.y0);
  kv["grid.L1"] = format_double(c.grid.L1);
  kv["grid.L2"] = format_double(c.grid.L2);
  kv["grid.N1"] = std::to_string(c.grid.N1);
  kv["grid.N2"] = std::to_string(c.grid.N2);
  kv["grid.nodes"] = c.grid.placement == NodePlacement::CellCentred ? "centred" : "endpoints";
  kv["n_contour"] = std::to_string(c.method.n_contour);
  kv["q"] = std::to_string(c.method.q);
  kv["n_avg"] = std::to_string(c.method.n_avg);
  kv["unit_density"] = c.method.unit_density ? "true" : "false";
  kv["tracer.rel_tol"] = format_double(c.method.tracer.rel_tol);
  kv["tracer.abs_tol"] = format_double(c.method.tracer.abs_tol);
  kv["tracer.max_time"] = format_double(c.method.tracer.max_time);
  kv["tracer.max_step"] = format_double(c.method.tracer.max_step);
  kv["uline.filter_valid"] = c.method.uline.filter_valid ? "true" : "false";
  kv["uline.count"] = std::to_string(c.method.uline.count_required);
  kv["uline.match_tol"] = format_double(c.method.uline.match_tol);
  kv["clip"] = format_double(c.clip);
  kv["endpoint"] = c.endpoint == EndpointPolicy::Extrapolate ? "extrapolate" : "direct";
  kv["add_enclosed"] = c.add_enclosed ? "true" : "false";
  kv["output"] = c.output;
  kv["metadata"] = c.metadata;
  kv["seed"] = std::to_string(c.seed);
  kv["threads"] = std::to_string(c.threads);
  kv["strict"] = c.strict ? "true" : "false";
  return kv;
}

std::string serialize(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : to_key_values(cfg)) out += k + " = " + v + "\n";
  return out;
}

RunConfig parse_config(const std::string& text) {
  return apply_key_values(parse_key_values(text));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::unique_ptr<FieldModel> make_field(const RunConfig& cfg) {
  return wrap("field", [&] { return make_field(cfg.field, cfg.axisym, cfg.helical); });
}

}  // namespace fluxvol
