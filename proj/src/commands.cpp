#include "fluxvol/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "fluxvol/checks.hpp"
#include "fluxvol/parallel.hpp"
#include "fluxvol/report.hpp"

namespace fluxvol {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Anchor values are printed to four decimals, so a bound this close to a
// region edge is taken to mean the edge itself.
constexpr double kSnapTolerance = 5e-4;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

VolumeProfile empty_profile(Method m, Region r, double a, double b) {
  VolumeProfile p;
  p.method = m;
  p.region = r;
  p.rows = {{a, 0.0, 0.0}, {b, 0.0, 0.0}};
  p.provenance["method"] = std::string(to_string(m));
  p.provenance["region"] = std::string(to_string(r));
  p.provenance["empty"] = "true";
  return p;
}

struct VolumeRun {
  const RunConfig& cfg;
  const FieldModel& field;
  const CriticalSet* crit;
  std::ostream& err;
  bool failed = false;

  VolumeProfile grid(Region region, double a, double b) {
    PointMask mask;
    if (crit) {
      const auto* hel = static_cast<const HelicalField*>(&field);
      const CriticalSet* c = crit;
      mask = [hel, c, region](const Vec3& x) { return classify(*hel, *c, x).region == region; };
    }
    const GridResult r =
        volume_grid(field, std::min(a, b), std::max(a, b), cfg.grid, mask, cfg.method.tracer);
    VolumeProfile p;
    p.method = Method::Grid;
    p.region = region;
    p.rows = {{a, kNaN, 0.0}, {b, kNaN, r.volume}};
    p.provenance["method"] = "grid";
    p.provenance["region"] = std::string(to_string(region));
    p.provenance["field"] = std::string(field.name());
    p.provenance["members"] = std::to_string(r.members);
    p.provenance["failures"] = std::to_string(r.failures);
    p.provenance["N1"] = std::to_string(cfg.grid.N1);
    p.provenance["N2"] = std::to_string(cfg.grid.N2);
    p.provenance["nodes"] =
        cfg.grid.placement == NodePlacement::Endpoints ? "endpoints" : "centred";
    if (r.empty()) err << "warning: no grid node lies between the two surfaces, V = 0\n";
    if (r.failures > 0) {
      err << "warning: " << r.failures << " grid nodes could not be traced\n";
      failed = true;
    }
    return p;
  }

  VolumeProfile one(Method m, Region region, double a, double b) {
    if (a == b) {
      err << "warning: empty Psi interval, V = 0\n";
      return empty_profile(m, region, a, b);
    }
    if (m == Method::Grid) return grid(region, a, b);
    return compute_profile(field, crit, m, region, a, b, cfg.n, cfg.method, cfg.clip,
                           cfg.endpoint);
  }
};

}  // namespace

int cmd_volume(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  set_thread_count(cfg.threads);
  const std::unique_ptr<FieldModel> field = make_field(cfg);
  const bool helical = field->kind() == FieldKind::Helical;
  if (!helical && cfg.region != Region::Inner)
    throw ConfigError("region", "the axisymmetric field has only the inner region");
  for (Method m : cfg.methods) {
    if (m == Method::Thm1 && helical)
      throw ConfigError("method", "thm1 needs the axisymmetric field");
  }

  CriticalSet crit;
  double a = cfg.psi1;
  double b = cfg.psi2;
  if (helical) {
    crit = find_critical_points(static_cast<const HelicalField&>(*field));
    if (cfg.region == Region::Island && !crit.has_island())
      throw ConfigError("region", "the field has no island");
    for (double* p : {&a, &b}) {
      const double before = *p;
      if (snap_to_region(crit, cfg.region, *p, kSnapTolerance))
        err << "note: Psi = " << num(before) << " taken as the region edge " << num(*p) << "\n";
    }
  }

  VolumeRun run{cfg, *field, helical ? &crit : nullptr, err};
  std::vector<VolumeProfile> profiles;
  for (Method m : cfg.methods) {
    try {
      VolumeProfile p = run.one(m, cfg.region, a, b);
      if (cfg.add_enclosed && helical && cfg.region == Region::Outer) {
        double enclosed = run.one(m, Region::Inner, crit.psi_sep, crit.psi_axis).total();
        if (crit.has_island())
          enclosed += run.one(m, Region::Island, crit.psi_o, crit.psi_sep).total();
        for (auto& row : p.rows) row.V_cum += enclosed;
        p.provenance["enclosed"] = format17(enclosed);
      }
      out << to_string(m) << " " << to_string(cfg.region) << " Psi [" << num(a) << ", "
          << num(b) << "]  V = " << num(p.total());
      if (!helical && m != Method::Grid) {
        const double exact = AxisymField::exact_volume(std::max(a, b)) -
                             AxisymField::exact_volume(std::min(a, b));
        if (exact > 0.0) out << "  rel_err_exact = " << num(std::abs(p.total() / exact - 1.0));
      }
      out << "\n";
      profiles.push_back(std::move(p));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      err << "error: " << to_string(m) << ": " << e.what() << "\n";
      run.failed = true;
    }
  }

  std::ostringstream csv;
  write_profile_csv(csv, profiles);
  emit(cfg.output, csv.str(), out);
  if (cfg.output != "-") {
    nlohmann::json meta = profile_metadata(cfg, profiles);
    meta["failed"] = run.failed;
    write_file(cfg.metadata_path(), meta.dump(2) + "\n");
  }
  return run.failed && cfg.strict ? kExitNumerical : kExitOk;
}

int cmd_table(TableChoice which, const TableOptions& opts, const std::string& output,
              bool strict, std::ostream& out, std::ostream& err) {
  std::vector<TableCell> cells;
  if (which != TableChoice::Table2) cells = run_table1(opts);
  if (which != TableChoice::Table1) {
    auto t2 = run_table2(opts);
    cells.insert(cells.end(), t2.begin(), t2.end());
  }
  bool all_ok = true;
  for (const auto& c : cells) {
    out << (c.ok ? "ok   " : "FAIL ") << c.table << " " << c.interval << " "
        << to_string(c.method) << "  V = " << num(c.value) << "  ref = " << num(c.reference)
        << "  rel_err = " << num(c.rel_err) << "  published = " << num(c.published_value) << "  "
        << num(c.runtime_s) << " s\n";
    if (!c.ok) {
      all_ok = false;
      err << "cell outside band: " << c.table << " " << c.interval << " "
          << to_string(c.method) << " (" << c.note << ")\n";
    }
  }
  std::ostringstream csv;
  write_table_csv(csv, cells);
  emit(output, csv.str(), out);
  return !all_ok && strict ? kExitNumerical : kExitOk;
}

int cmd_diagnostics(const RunConfig& cfg, const DiagnosticsOptions& opts, std::ostream& out,
                    std::ostream& err) {
  cfg.validate();
  if (opts.surfaces < 1) throw ConfigError("surfaces", "must be >= 1");
  set_thread_count(cfg.threads);
  const std::unique_ptr<FieldModel> field = make_field(cfg);
  const bool helical = field->kind() == FieldKind::Helical;
  CriticalSet crit;
  if (helical) crit = find_critical_points(static_cast<const HelicalField&>(*field));

  struct Job {
    Region region;
    double psi;
  };
  std::vector<Job> jobs;
  auto sweep = [&](Region r, double lo, double hi) {
    for (int k = 0; k < opts.surfaces; ++k)
      jobs.push_back({r, lo + (hi - lo) * (k + 0.5) / opts.surfaces});
  };
  if (opts.single_region) {
    if (!helical && cfg.region != Region::Inner)
      throw ConfigError("region", "the axisymmetric field has only the inner region");
    sweep(cfg.region, cfg.psi1, cfg.psi2);
  } else if (!helical) {
    sweep(Region::Inner, 0.0, 0.32);
  } else {
    for (Region r : {Region::Inner, Region::Island, Region::Outer}) {
      if (r == Region::Island && !crit.has_island()) continue;
      const PsiInterval iv = region_interval(crit, r);
      sweep(r, iv.lo, std::isfinite(iv.hi) ? iv.hi : 0.0172);
    }
  }

  constexpr int kAvg[] = {1, 10, 20, 30};
  constexpr int kQ[] = {4, 5, 6, 7};
  struct Row {
    double T = kNaN;
    double avg[4] = {kNaN, kNaN, kNaN, kNaN};
    double inv_rho[4] = {kNaN, kNaN, kNaN, kNaN};
    std::string status = "ok";
  };
  std::vector<Row> rows(jobs.size());
  const TracerOptions& topts = cfg.method.tracer;
  parallel_for(jobs.size(), [&](std::size_t i) {
    Row& row = rows[i];
    try {
      const Vec3 x0 = helical ? surface_seed(static_cast<const HelicalField&>(*field), crit,
                                             jobs[i].psi, jobs[i].region)
                              : surface_seed(static_cast<const AxisymField&>(*field),
                                             jobs[i].psi);
      const LatticeGenerators gen = lattice_generators(*field, x0, topts, cfg.method.uline);
      row.T = gen.T2[1];
      for (int k = 0; k < 4; ++k)
        row.inv_rho[k] = harmonic_average_rho(*field, x0, gen, kQ[k], topts).inv_rho_mean;
      std::vector<double> valid;
      for (const auto& e : uline_crossings(*field, FlowField::B, x0, 30, cfg.method.uline, topts))
        if (e.valid) valid.push_back(e.t);
      for (int k = 0; k < 4; ++k)
        if (int(valid.size()) >= kAvg[k]) row.avg[k] = valid[kAvg[k] - 1] / kAvg[k];
    } catch (const TraceTimeout&) {
      row.status = "timeout";
    } catch (const std::exception& e) {
      row.status = "error";
    }
  });

  std::ostringstream csv;
  csv << "region,Psi,T,T_avg_1,T_avg_10,T_avg_20,T_avg_30,inv_rho_hat_4,inv_rho_hat_5,"
         "inv_rho_hat_6,inv_rho_hat_7,status\n";
  int bad = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Row& r = rows[i];
    csv << to_string(jobs[i].region) << ',' << format17(jobs[i].psi) << ',' << format17(r.T);
    for (double v : r.avg) csv << ',' << format17(v);
    for (double v : r.inv_rho) csv << ',' << format17(v);
    csv << ',' << r.status << '\n';
    if (r.status != "ok") ++bad;
  }
  emit(cfg.output, csv.str(), out);
  out << jobs.size() << " surfaces, " << bad << " without a result\n";
  if (bad > 0) err << "warning: " << bad << " surfaces timed out or failed\n";
  return bad > 0 && cfg.strict ? kExitNumerical : kExitOk;
}

int cmd_check(const RunConfig& cfg, bool include_grid, std::ostream& out, std::ostream&) {
  set_thread_count(cfg.threads);
  CheckOptions opts;
  opts.seed = cfg.seed;
  opts.include_grid = include_grid;
  opts.tracer = cfg.method.tracer;
  bool all = true;
  for (const auto& r : run_property_checks(opts)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << "  value = " << num(r.value)
        << "  tol = " << num(r.tolerance) << "  " << r.detail << "\n";
    all = all && r.passed;
  }
  return all ? kExitOk : kExitNumerical;
}

}  // namespace fluxvol
