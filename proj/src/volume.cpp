#include "fluxvol/volume.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fluxvol/parallel.hpp"

namespace fluxvol {

namespace {

double det3(const Vec3& a, const Vec3& b, const Vec3& c) {
  return a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
         a[2] * (b[0] * c[1] - b[1] * c[0]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Grid:
      return "grid";
    case Method::Contour:
      return "contour";
    case Method::Thm1:
      return "thm1";
    case Method::Thm3p:
      return "thm3p";
    case Method::Thm4:
      return "thm4";
  }
  return "?";
}

Method method_from_string(std::string_view s) {
  if (s == "grid") return Method::Grid;
  if (s == "contour") return Method::Contour;
  if (s == "thm1") return Method::Thm1;
  if (s == "thm3p") return Method::Thm3p;
  if (s == "thm4") return Method::Thm4;
  throw std::invalid_argument("unknown method '" + std::string(s) + "'");
}

// -- grid ---------------------------------------------------------------------

void GridSpec::validate() const {
  if (N1 < 2 || N2 < 2) throw std::invalid_argument("grid: N1, N2 must be >= 2");
  if (!(L1 > 0.0) || !(L2 > 0.0)) throw std::invalid_argument("grid: L1, L2 must be > 0");
}

double GridSpec::node_x(int i) const {
  if (placement == NodePlacement::Endpoints) return x0 - L1 + 2.0 * L1 * i / (N1 - 1);
  return x0 - L1 + 2.0 * L1 * (i + 0.5) / N1;
}

double GridSpec::node_y(int j) const {
  if (placement == NodePlacement::Endpoints) return y0 - L2 + 2.0 * L2 * j / (N2 - 1);
  return y0 - L2 + 2.0 * L2 * (j + 0.5) / N2;
}

GridResult volume_grid(const FieldModel& field, double Psi0, double Psi1,
                       const GridSpec& grid, const PointMask& mask,
                       const TracerOptions& opts) {
  grid.validate();
  const double lo = std::min(Psi0, Psi1);
  const double hi = std::max(Psi0, Psi1);
  const std::size_t n = static_cast<std::size_t>(grid.N1) * grid.N2;
  // 0: outside, 1: member, 2: member whose trace failed
  std::vector<double> contribution(n, 0.0);
  std::vector<unsigned char> status(n, 0);

  parallel_for(n, [&](std::size_t k) {
    const int i = static_cast<int>(k / grid.N2);
    const int j = static_cast<int>(k % grid.N2);
    const Vec3 x = field.from_section(grid.node_x(i), grid.node_y(j));
    const double Psi = field.psi_label(x);
    if (!(Psi > lo && Psi < hi)) return;
    if (mask && !mask(x)) return;
    try {
      contribution[k] = transit_time(field, x, opts) * field.flux_form_coefficient(x);
      status[k] = 1;
    } catch (const TraceError&) {
      status[k] = 2;
    }
  });

  GridResult r;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (status[k] == 0) continue;
    ++r.members;
    if (status[k] == 2) {
      ++r.failures;
      continue;
    }
    sum += contribution[k];
  }
  r.volume = sum * grid.cell_area();
  return r;
}

// -- per-surface ----------------------------------------------------------------

double dVdPsi_contour(const FieldModel& field, const LevelSetContour& contour,
                      const TracerOptions& opts) {
  const bool wrap_poloidal = field.chart() == Chart::AdaptedToroidal;
  double total = 0.0;
  for (const auto& loop : contour.loops) {
    const std::size_t n = loop.size();
    std::vector<double> terms(n, 0.0);
    parallel_for(n, [&](std::size_t j) {
      const Vec3& prev = loop[(j + n - 1) % n];
      const Vec3& next = loop[(j + 1) % n];
      Vec3 eps;
      for (int i = 0; i < 3; ++i) eps[i] = 0.5 * (next[i] - prev[i]);
      if (wrap_poloidal) eps[1] = 0.5 * coords::wrap_angle(next[1] - prev[1]);
      if (eps[0] == 0.0 && eps[1] == 0.0 && eps[2] == 0.0) return;
      const Vec3& x = loop[j];
      const double i_eps =
          field.sqrt_g(x) * det3(field.normal_contra(x), field.b_contra(x), eps);
      terms[j] = transit_time(field, x, opts) * i_eps;
    });
    for (double t : terms) total += t;
  }
  return std::abs(total);
}

double dVdPsi_thm1(const AxisymField& field, const Vec3& x0, const TracerOptions& opts) {
  const auto ev = return_to_section(field, FlowField::B, x0, Section::PoloidalAngle, 1, opts);
  return kTwoPi * ev.front().t;
}

Thm3pSample dVdPsi_thm3p(const FieldModel& field, const Vec3& x0, int q,
                         bool unit_density, const TracerOptions& opts,
                         const UlineOptions& uopts) {
  Thm3pSample s;
  if (unit_density) {
    s.T = return_to_uline(field, FlowField::B, x0, uopts, opts).t;
    s.Delta = field.uline_period() * s.T;
    s.inv_rho_mean = 1.0;
  } else {
    const LatticeGenerators gen = lattice_generators(field, x0, opts, uopts);
    s.T = gen.T2[1];
    s.Delta = gen.Delta;
    s.inv_rho_mean = harmonic_average_rho(field, x0, gen, q, opts).inv_rho_mean;
  }
  s.dVdPsi = s.Delta * s.inv_rho_mean;
  return s;
}

double dVdPsi_thm4(const FieldModel& field, const Vec3& x0, int n_avg,
                   const TracerOptions& opts) {
  if (n_avg < 1) throw std::invalid_argument("thm4: n_avg must be >= 1");
  return kTwoPi * mean_return_time(field, FlowField::B, x0, n_avg, {}, opts);
}

double phi_flux(const FieldModel& field, const Vec3& x0, int n_nodes) {
  if (n_nodes < 1) throw std::invalid_argument("phi_flux: n_nodes must be >= 1");
  const double period = field.uline_period();
  const double ds = period / n_nodes;
  double sum = 0.0;
  for (int k = 0; k < n_nodes; ++k) {
    const Vec3 x = field.u_flow(x0, k * ds);
    const Vec3 a = field.a_cov(x);
    const Vec3 u = field.u_contra(x);
    sum += a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
  }
  return sum * ds;
}

// -- ladders --------------------------------------------------------------------

PsiLadder make_ladder(double a, double b, int n, Region region,
                      const SingularSurfaces& singular, double clip,
                      EndpointPolicy policy) {
  if (n < 1) throw std::invalid_argument("ladder needs at least one interval");
  if (!(a != b)) throw std::invalid_argument("ladder interval is empty");
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  PsiLadder L;
  L.region = region;
  L.policy = policy;
  L.separatrix_clip = clip > 0.0 ? clip : std::max(1e-4 * (hi - lo), 1e-6);

  // Count outward from the region centre, or from the separatrix when the
  // region has no centre.
  double reference = lo;
  if (std::isfinite(singular.centre)) {
    reference = singular.centre;
  } else if (std::isfinite(singular.separatrix)) {
    reference = singular.separatrix;
  }
  const bool descending = std::abs(hi - reference) < std::abs(lo - reference);
  const double start = descending ? hi : lo;
  const double stop = descending ? lo : hi;
  for (int k = 0; k <= n; ++k) {
    L.values.push_back(k == n ? stop : start + (stop - start) * k / n);
  }
  L.sample_at = L.values;
  L.extrapolated.assign(L.values.size(), false);
  L.log_panel.assign(L.values.size(), false);

  const double delta = L.separatrix_clip;
  auto adjust = [&](std::size_t k, double inward) {
    const double v = L.values[k];
    double target = v;
    bool on_separatrix = false;
    if (std::abs(v - singular.centre) <= delta) {
      target = singular.centre + inward * delta;
    } else if (std::isfinite(singular.separatrix) &&
               std::abs(v - singular.separatrix) <= delta) {
      target = singular.separatrix + inward * delta;
      on_separatrix = true;
    } else {
      return;
    }
    L.sample_at[k] = target;
    L.extrapolated[k] = policy == EndpointPolicy::Extrapolate;
    L.log_panel[k] = L.extrapolated[k] && on_separatrix;
  };
  const double dir = stop > start ? 1.0 : -1.0;
  adjust(0, dir);
  adjust(L.values.size() - 1, -dir);
  return L;
}

VolumeProfile integrate_profile(const PsiLadder& ladder, std::vector<double> samples) {
  const std::size_t n = ladder.values.size();
  if (samples.size() != n) throw std::invalid_argument("one sample per ladder node");
  if (n < 2) throw std::invalid_argument("ladder needs at least two nodes");
  for (double& s : samples) {
    if (!std::isfinite(s)) throw NumericalError("non-finite dV/dPsi sample");
    s = std::abs(s);
  }
  std::vector<double> f = samples;
  auto extrapolate = [&](std::size_t k, std::size_t a, std::size_t b) {
    const double sa = ladder.sample_at[a];
    const double sb = ladder.sample_at[b];
    const double slope = (samples[b] - samples[a]) / (sb - sa);
    f[k] = std::max(0.0, samples[a] + slope * (ladder.values[k] - sa));
  };
  // Panel integral of a + b ln s over s in [0, h], with the model through
  // the clipped sample and the neighbouring node. Returns NaN when the
  // samples do not grow toward the separatrix.
  auto log_panel = [&](std::size_t k, std::size_t j) {
    const double sc = std::abs(ladder.sample_at[k] - ladder.values[k]);
    const double h = std::abs(ladder.values[j] - ladder.values[k]);
    if (!(sc > 0.0 && sc < h)) return std::numeric_limits<double>::quiet_NaN();
    const double b = (samples[j] - samples[k]) / (std::log(h) - std::log(sc));
    if (!(b < 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double a = samples[j] - b * std::log(h);
    return a * h + b * (h * std::log(h) - h);
  };
  std::vector<double> panel(n, std::numeric_limits<double>::quiet_NaN());
  if (ladder.extrapolated[0]) extrapolate(0, 0, 1);
  if (ladder.extrapolated[n - 1]) extrapolate(n - 1, n - 1, n - 2);
  if (!ladder.log_panel.empty()) {
    if (ladder.log_panel[0]) panel[1] = log_panel(0, 1);
    if (ladder.log_panel[n - 1]) panel[n - 1] = log_panel(n - 1, n - 2);
  }
  bool used_log = false;
  for (std::size_t k = 1; k < n; ++k) {
    if (std::isnan(panel[k])) continue;
    used_log = true;
    // report the sampled value; the node value itself is unbounded
    const std::size_t end = k == 1 && ladder.log_panel[0] ? 0 : n - 1;
    f[end] = samples[end];
  }

  VolumeProfile p;
  p.region = ladder.region;
  double V = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      V += std::isnan(panel[k])
               ? 0.5 * (f[k] + f[k - 1]) * std::abs(ladder.values[k] - ladder.values[k - 1])
               : panel[k];
    }
    p.rows.push_back({ladder.values[k], f[k], V});
  }
  if (used_log) p.provenance["separatrix_panel"] = "log";
  p.provenance["ladder_intervals"] = std::to_string(n - 1);
  p.provenance["separatrix_clip"] = fmt(ladder.separatrix_clip);
  p.provenance["endpoint_policy"] =
      ladder.policy == EndpointPolicy::Extrapolate ? "extrapolate" : "direct";
  return p;
}

// -- profiles -------------------------------------------------------------------

double dVdPsi_at(const FieldModel& field, const CriticalSet* crit, Method method,
                 Region region, double Psi, const MethodOptions& opts) {
  if (method == Method::Grid) {
    throw std::invalid_argument("the grid sum has no per-surface form");
  }
  Vec3 seed;
  LevelSetContour contour;
  if (const auto* ax = dynamic_cast<const AxisymField*>(&field)) {
    if (method == Method::Contour) {
      contour = extract_contour(*ax, Psi, opts.n_contour);
    } else {
      seed = surface_seed(*ax, Psi);
    }
    if (method == Method::Thm1) return dVdPsi_thm1(*ax, seed, opts.tracer);
  } else {
    const auto* hel = dynamic_cast<const HelicalField*>(&field);
    if (!hel || !crit) throw std::invalid_argument("helical field needs critical points");
    if (method == Method::Thm1) {
      throw std::invalid_argument("thm1 applies to the axisymmetric field only");
    }
    if (method == Method::Contour) {
      contour = extract_contour(*hel, *crit, Psi, region, opts.n_contour);
    } else {
      seed = surface_seed(*hel, *crit, Psi, region);
    }
  }
  switch (method) {
    case Method::Contour:
      return dVdPsi_contour(field, contour, opts.tracer);
    case Method::Thm3p:
      return dVdPsi_thm3p(field, seed, opts.q, opts.unit_density, opts.tracer, opts.uline)
          .dVdPsi;
    case Method::Thm4:
      return dVdPsi_thm4(field, seed, opts.n_avg, opts.tracer);
    default:
      break;
  }
  throw std::logic_error("unhandled method");
}

VolumeProfile compute_profile(const FieldModel& field, const CriticalSet* crit,
                              Method method, Region region, double Psi_a,
                              double Psi_b, int n, const MethodOptions& opts,
                              double clip, EndpointPolicy policy) {
  SingularSurfaces singular;
  if (crit && field.kind() == FieldKind::Helical) {
    const PsiInterval iv = region_interval(*crit, region);
    singular.centre = region == Region::Island ? crit->psi_o : crit->psi_axis;
    if (region == Region::Outer) singular.centre = std::numeric_limits<double>::quiet_NaN();
    if (crit->has_island()) singular.separatrix = crit->psi_sep;
    const double lo = std::min(Psi_a, Psi_b);
    const double hi = std::max(Psi_a, Psi_b);
    if (lo < iv.lo - 1e-12 || hi > iv.hi + 1e-12) {
      throw coords::DomainError("Psi interval leaves the " +
                                std::string(to_string(region)) + " region");
    }
  }
  const PsiLadder ladder = make_ladder(Psi_a, Psi_b, n, region, singular, clip, policy);
  std::vector<double> samples(ladder.values.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t k) {
    samples[k] = dVdPsi_at(field, crit, method, region, ladder.sample_at[k], opts);
  });
  VolumeProfile p = integrate_profile(ladder, std::move(samples));
  p.method = method;
  p.region = region;
  p.provenance["method"] = std::string(to_string(method));
  p.provenance["region"] = std::string(to_string(region));
  p.provenance["field"] = std::string(field.name());
  p.provenance["rel_tol"] = fmt(opts.tracer.rel_tol);
  p.provenance["abs_tol"] = fmt(opts.tracer.abs_tol);
  if (method == Method::Contour) p.provenance["n_contour"] = std::to_string(opts.n_contour);
  if (method == Method::Thm3p) p.provenance["q"] = std::to_string(opts.q);
  if (method == Method::Thm4) p.provenance["n_avg"] = std::to_string(opts.n_avg);
  return p;
}

}  // namespace fluxvol
