#include "fluxvol/tables.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fluxvol/report.hpp"

namespace fluxvol {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

double rel(double a, double b) { return std::abs(a / b - 1.0); }

void finish(TableCell& c) {
  c.rel_err = rel(c.value, c.reference);
  c.ok = c.rel_err <= c.tolerance;
  if (c.published_value != 0.0) c.published_rel_dev = rel(c.value, c.published_value);
  if (c.published_tolerance > 0.0 && c.published_rel_dev > c.published_tolerance) {
    c.ok = false;
    c.note = "differs from the printed value by more than the band";
  }
  if (c.rel_err > c.tolerance) c.note = "outside the band around the reference";
}

struct Table1Row {
  double psi;
  int grid_n;
  double published_grid;
  double published_contour;
  double published_thm1;
};

}  // namespace

const std::vector<Table2Interval>& table2_intervals() {
  static const std::vector<Table2Interval> rows = {
      {"inner-small", 0.0, 0.150, Region::Inner, 300, 100, 0.997447, 1.002811, 1.013366,
       1.003619},
      {"inner-large", 0.0, 0.320, Region::Inner, 300, 100, 4.998763, 5.027210, 5.031270,
       5.031856},
      {"island-small", 0.52542, 0.550, Region::Island, 500, 100, 0.155675, 0.154939,
       0.155206, 0.155038},
      {"island-large", 0.52542, 0.662, Region::Island, 500, 150, 7.470030, 7.492240,
       7.521046, 7.519672},
      {"outer-small", 0.66345, 0.670, Region::Outer, 600, 100, 0.639184, 0.650239, 0.649799,
       0.650996},
      {"outer-large", 0.66345, 0.780, Region::Outer, 600, 100, 7.736527, 7.906824, 7.904392,
       7.909134},
  };
  return rows;
}

std::pair<double, double> table2_bounds(const HelicalField& field, const CriticalSet& crit,
                                        const Table2Interval& iv) {
  auto at = [&](double y) { return field.psi_label(field.from_section(y, 0.0)); };
  double a = iv.ytil1 == 0.0 ? crit.psi_axis : at(iv.ytil1);
  const double b = at(iv.ytil2);
  if (iv.region == Region::Island) a = std::max(a, crit.psi_o);
  if (iv.region == Region::Outer) a = std::max(a, crit.psi_sep);
  return {a, b};
}

std::vector<TableCell> run_table1(const TableOptions& opts) {
  static const std::vector<Table1Row> rows = {
      {0.02, 300, 0.782214, 0.787261, 0.789548},
      {0.08, 200, 3.123140, 3.149079, 3.158248},
      {0.18, 200, 7.016993, 7.085340, 7.106088},
      {0.32, 200, 12.488658, 12.595751, 12.633059},
  };
  const AxisymField field;
  MethodOptions mo;
  mo.tracer = opts.tracer;
  std::vector<TableCell> cells;
  for (const auto& r : rows) {
    const double exact = AxisymField::exact_volume(r.psi);
    char label[32];
    std::snprintf(label, sizeof label, "Psi=%.2f", r.psi);
    auto base = [&](Method m) {
      TableCell c;
      c.table = "table1";
      c.interval = label;
      c.psi1 = 0.0;
      c.psi2 = r.psi;
      c.method = m;
      c.reference = exact;
      return c;
    };
    if (opts.include_grid) {
      TableCell c = base(Method::Grid);
      c.N1 = c.N2 = r.grid_n;
      const GridSpec g{1.0, 0.0, 0.9, 0.9, r.grid_n, r.grid_n, opts.grid_nodes};
      Stopwatch sw;
      c.value = volume_grid(field, 0.0, r.psi, g, {}, opts.tracer).volume;
      c.runtime_s = sw.seconds();
      c.tolerance = 0.02;
      c.published_value = r.published_grid;
      finish(c);
      cells.push_back(c);
    }
    {
      TableCell c = base(Method::Contour);
      c.N1 = c.N2 = 50;
      mo.n_contour = 50;
      Stopwatch sw;
      c.value = compute_profile(field, nullptr, Method::Contour, Region::Inner, 0.0, r.psi, 50,
                                mo, 0.0, opts.endpoint)
                    .total();
      c.runtime_s = sw.seconds();
      c.tolerance = 0.005;
      c.published_value = r.published_contour;
      finish(c);
      cells.push_back(c);
    }
    {
      TableCell c = base(Method::Thm1);
      c.N1 = 20;
      Stopwatch sw;
      c.value = compute_profile(field, nullptr, Method::Thm1, Region::Inner, 0.0, r.psi, 20, mo,
                                0.0, opts.endpoint)
                    .total();
      c.runtime_s = sw.seconds();
      c.tolerance = 1e-4;
      c.published_value = r.published_thm1;
      finish(c);
      cells.push_back(c);
    }
  }
  return cells;
}

std::vector<TableCell> run_table2(const TableOptions& opts) {
  const HelicalField field;
  const CriticalSet crit = find_critical_points(field);
  std::vector<TableCell> cells;
  for (const auto& iv : table2_intervals()) {
    const auto [a, b] = table2_bounds(field, crit, iv);
    MethodOptions mo;
    mo.tracer = opts.tracer;
    mo.n_contour = iv.n_contour;
    const double vstar = compute_profile(field, &crit, Method::Thm3p, iv.region, a, b,
                                         opts.reference_n, mo, 0.0, opts.endpoint)
                             .total();
    auto base = [&](Method m) {
      TableCell c;
      c.table = "table2";
      c.interval = iv.label;
      c.region = iv.region;
      c.psi1 = a;
      c.psi2 = b;
      c.method = m;
      c.reference = vstar;
      c.tolerance = 0.02;
      return c;
    };
    if (opts.include_grid) {
      TableCell c = base(Method::Grid);
      c.N1 = c.N2 = iv.grid_n;
      GridSpec g = iv.region == Region::Inner
                       ? GridSpec{0.0, 0.0, 0.335, 0.47, iv.grid_n, iv.grid_n, opts.grid_nodes}
                       : GridSpec{0.0, 0.0, 0.9, 0.8, iv.grid_n, iv.grid_n, opts.grid_nodes};
      const Region want = iv.region;
      auto mask = [&](const Vec3& x) { return classify(field, crit, x).region == want; };
      Stopwatch sw;
      c.value = volume_grid(field, a, b, g, mask, opts.tracer).volume;
      c.runtime_s = sw.seconds();
      c.published_value = iv.published_grid;
      finish(c);
      cells.push_back(c);
    }
    const std::pair<Method, double> per_surface[] = {{Method::Contour, iv.published_contour},
                                                     {Method::Thm3p, iv.published_thm3p},
                                                     {Method::Thm4, iv.published_thm4}};
    for (const auto& [m, printed] : per_surface) {
      TableCell c = base(m);
      c.N1 = 100;
      if (m == Method::Contour) c.N2 = iv.n_contour;
      Stopwatch sw;
      c.value = compute_profile(field, &crit, m, iv.region, a, b, 100, mo, 0.0, opts.endpoint)
                    .total();
      c.runtime_s = sw.seconds();
      c.published_value = printed;
      if (m == Method::Thm3p || m == Method::Thm4) c.published_tolerance = 0.005;
      finish(c);
      cells.push_back(c);
    }
  }
  return cells;
}

void write_table_csv(std::ostream& out, const std::vector<TableCell>& cells) {
  out << "table,interval,region,Psi1,Psi2,method,N1,N2,V0,reference,rel_err,tolerance,"
         "published_V0,published_rel_dev,runtime_s,ok\n";
  for (const auto& c : cells) {
    out << c.table << ',' << csv_field(c.interval) << ',' << to_string(c.region) << ','
        << format17(c.psi1) << ',' << format17(c.psi2) << ',' << to_string(c.method) << ','
        << c.N1 << ',' << (c.N2 > 0 ? std::to_string(c.N2) : "") << ',' << format17(c.value)
        << ',' << format17(c.reference) << ',' << format17(c.rel_err) << ','
        << format17(c.tolerance) << ',' << format17(c.published_value) << ','
        << format17(c.published_rel_dev) << ',' << format17(c.runtime_s) << ','
        << (c.ok ? "true" : "false") << '\n';
  }
}

}  // namespace fluxvol
