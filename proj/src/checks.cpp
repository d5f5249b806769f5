#include "fluxvol/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "fluxvol/coords.hpp"
#include "fluxvol/parallel.hpp"
#include "fluxvol/surfaces.hpp"

namespace fluxvol {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

CheckResult verdict(std::string name, double value, double tol, std::string detail = {}) {
  return {std::move(name), value, tol, value <= tol, std::move(detail)};
}

double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

// Random points away from the coordinate singularities of each chart.
Vec3 random_axisym_point(Rng& rng) {
  const double r = uniform(rng, 0.05, 0.8);
  const double th = uniform(rng, -kPi, kPi);
  return {1.0 + r * std::cos(th), uniform(rng, 0.0, kTwoPi), r * std::sin(th)};
}

Vec3 random_helical_point(Rng& rng) {
  return {uniform(rng, 0.01, 0.4), uniform(rng, -kPi, kPi), uniform(rng, 0.0, kTwoPi)};
}

Vec3 flux_density(const FieldModel& f, const Vec3& x) {
  const Vec3 b = f.b_contra(x);
  const double s = f.sqrt_g(x);
  return {s * b[0], s * b[1], s * b[2]};
}

}  // namespace

CheckResult check_psi_conservation(std::uint64_t seed, const TracerOptions& opts) {
  Rng rng(seed);
  const AxisymField ax;
  const HelicalField hel;
  double worst = 0.0;
  int traced = 0;
  auto run = [&](const FieldModel& f, const Vec3& x0) {
    const double p0 = f.psi_label(x0);
    if (std::abs(p0) < 1e-3) return;
    const auto ev = return_to_section(f, FlowField::B, x0, Section::ToroidalPlane, 10, opts);
    Trajectory tr(f, FlowField::B, x0, opts);
    tr.extend_to(ev.back().t);
    const int samples = 400;
    for (int k = 1; k <= samples; ++k) {
      const double t = ev.back().t * k / samples;
      worst = std::max(worst, std::abs(f.psi_label(tr.state(t)) / p0 - 1.0));
    }
    ++traced;
  };
  for (int i = 0; i < 4; ++i) run(ax, random_axisym_point(rng));
  for (int i = 0; i < 6; ++i) {
    // keep clear of the separatrix, where ten transits take very long
    Vec3 x = random_helical_point(rng);
    x[0] = uniform(rng, 0.01, 0.1);
    run(hel, x);
  }
  return verdict("psi_conservation", worst, 1e-7,
                 fmt("%.0f lines, 10 toroidal transits each", traced));
}

CheckResult check_divergence(std::uint64_t seed) {
  Rng rng(seed + 1);
  const AxisymField ax;
  const HelicalField hel;
  const double h = 1e-5;
  double worst = 0.0;
  auto probe = [&](const FieldModel& f, const Vec3& x) {
    double div = 0.0;
    for (int i = 0; i < 3; ++i) {
      Vec3 xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      div += (flux_density(f, xp)[i] - flux_density(f, xm)[i]) / (2.0 * h);
    }
    worst = std::max(worst, std::abs(div / f.sqrt_g(x)));
  };
  for (int i = 0; i < 50; ++i) {
    probe(ax, random_axisym_point(rng));
    probe(hel, random_helical_point(rng));
  }
  return verdict("divergence_B", worst, 1e-6, "central differences, h = 1e-5, 100 points");
}

CheckResult check_commutator(std::uint64_t seed) {
  Rng rng(seed + 2);
  const AxisymField ax;
  const HelicalField hel;
  const double h = 1e-5;
  double worst = 0.0;
  // u has constant components in both charts, so [u, v] = (u . grad) v.
  auto probe = [&](const FieldModel& f, const Vec3& x) {
    const Vec3 u = f.u_contra(x);
    Vec3 xp = x, xm = x;
    for (int i = 0; i < 3; ++i) {
      xp[i] += h * u[i];
      xm[i] -= h * u[i];
    }
    const Vec3 vp = f.v_contra(xp);
    const Vec3 vm = f.v_contra(xm);
    const Vec3 d{(vp[0] - vm[0]) / (2 * h), (vp[1] - vm[1]) / (2 * h),
                 (vp[2] - vm[2]) / (2 * h)};
    worst = std::max(worst, norm(d) / norm(f.v_contra(x)));
  };
  for (int i = 0; i < 50; ++i) {
    probe(ax, random_axisym_point(rng));
    probe(hel, random_helical_point(rng));
  }
  return verdict("commutator_u_v", worst, 1e-6, "|[u, B/rho]| / |B/rho|, 100 points");
}

CheckResult check_uline_start(std::uint64_t seed, const TracerOptions& opts) {
  Rng rng(seed + 3);
  const AxisymField ax;
  const HelicalField hel;
  const CriticalSet crit = find_critical_points(hel);
  double worst = 0.0;
  auto probe = [&](const FieldModel& f, const Vec3& x0) {
    const double t0 = return_to_uline(f, FlowField::V, x0, {}, opts).t;
    const Vec3 x1 = f.u_flow(x0, uniform(rng, 0.0, f.uline_period()));
    const double t1 = return_to_uline(f, FlowField::V, x1, {}, opts).t;
    worst = std::max(worst, std::abs(t1 / t0 - 1.0));
  };
  for (int i = 0; i < 3; ++i) probe(ax, random_axisym_point(rng));
  const std::pair<Region, double> surfaces[] = {
      {Region::Inner, 0.4}, {Region::Inner, 0.8}, {Region::Island, 0.5},
      {Region::Outer, 0.5}};
  for (const auto& [region, frac] : surfaces) {
    const PsiInterval iv = region_interval(crit, region);
    const double hi = std::isfinite(iv.hi) ? iv.hi : 0.017;
    const double psi = iv.lo + frac * (hi - iv.lo);
    probe(hel, surface_seed(hel, crit, psi, region));
  }
  return verdict("uline_start_invariance", worst, 1e-6, "7 surfaces, random u-line offsets");
}

CheckResult check_chart_round_trips(std::uint64_t seed) {
  using namespace coords;
  Rng rng(seed + 4);
  const TorusGeometry geo{1.0, 2.0};
  double worst = 0.0;
  auto diff = [&](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  auto dangle = [&](double a, double b) { worst = std::max(worst, std::abs(wrap_angle(a - b))); };
  for (int i = 0; i < 200; ++i) {
    const PointCyl c{uniform(rng, 0.5, 3.0), uniform(rng, -kPi, kPi), uniform(rng, -1, 1)};
    const PointCyl c2 = cyl_of_cartesian(cartesian_of_cyl(c));
    diff(c.R, c2.R);
    dangle(c.phi, c2.phi);
    diff(c.z, c2.z);

    const PointTorStd s{uniform(rng, 0.01, 0.9), uniform(rng, -kPi, kPi),
                        uniform(rng, -kPi, kPi)};
    const PointTorStd s2 = standard_of_cyl(cyl_of_standard(s, geo.R0), geo.R0);
    diff(s.r, s2.r);
    dangle(s.theta, s2.theta);
    dangle(s.phi, s2.phi);

    const PointTorAdapted a{uniform(rng, 0.001, 0.4), uniform(rng, -kPi, kPi),
                            uniform(rng, -kPi, kPi)};
    const PointTorAdapted a2 = adapted_of_standard(standard_of_adapted(a, geo), geo);
    diff(a.psi, a2.psi);
    dangle(a.vtheta, a2.vtheta);
    dangle(a.phi, a2.phi);

    const PointTorAdapted a3 = adapted_of_cyl(cyl_of_adapted(a, geo), geo);
    diff(a.psi, a3.psi);
    dangle(a.vtheta, a3.vtheta);

    const auto back = adapted_of_symplectic(symplectic_of_adapted(a, geo.B0), geo.B0, a.phi);
    diff(a.psi, back.point.psi);
    dangle(a.vtheta, back.point.vtheta);
  }
  return verdict("chart_round_trips", worst, 1e-12, "200 points per chart pair");
}

CheckResult check_phi_identity(std::uint64_t seed, int lines) {
  // Psi = -(A . u) holds for the helical label only; the axisymmetric label
  // comes with the opposite orientation.
  Rng rng(seed + 5);
  const HelicalField hel;
  double worst = 0.0;
  for (int i = 0; i < lines; ++i) {
    const Vec3 x = random_helical_point(rng);
    const double want = -kTwoPi * hel.psi_label(x);
    if (std::abs(want) < 1e-6) continue;
    worst = std::max(worst, std::abs(phi_flux(hel, x) / want - 1.0));
  }
  return verdict("phi_identity", worst, 1e-8,
                 fmt("%.0f random helical u-lines, 64-node trapezoid", lines));
}

CheckResult check_harmonic_convergence(int per_region, const TracerOptions& opts) {
  const HelicalField hel;
  const CriticalSet crit = find_critical_points(hel);
  struct Job {
    Region region;
    double psi;
  };
  std::vector<Job> jobs;
  for (Region r : {Region::Inner, Region::Island, Region::Outer}) {
    const PsiInterval iv = region_interval(crit, r);
    const double hi = std::isfinite(iv.hi) ? iv.hi : 0.017;
    for (int k = 0; k < per_region; ++k)
      jobs.push_back({r, iv.lo + (hi - iv.lo) * (0.05 + 0.9 * k / std::max(per_region - 1, 1))});
  }
  std::vector<double> dev(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    const Vec3 x0 = surface_seed(hel, crit, jobs[i].psi, jobs[i].region);
    const LatticeGenerators gen = lattice_generators(hel, x0, opts);
    const double a6 = harmonic_average_rho(hel, x0, gen, 6, opts).inv_rho_mean;
    const double a7 = harmonic_average_rho(hel, x0, gen, 7, opts).inv_rho_mean;
    dev[i] = std::abs(a6 - a7) / a7;
  });
  return verdict("harmonic_average_q6_q7", *std::max_element(dev.begin(), dev.end()), 1e-3,
                 fmt("%.0f surfaces per region", per_region));
}

GridConvergence grid_convergence(NodePlacement placement, const std::vector<int>& sizes,
                                 const TracerOptions& opts) {
  const AxisymField ax;
  const double psis[] = {0.02, 0.035, 0.05, 0.065, 0.08};
  GridConvergence out;
  out.sizes = sizes;
  for (int n : sizes) {
    double sum = 0.0;
    for (double p : psis) {
      const GridSpec g{1.0, 0.0, 0.9, 0.9, n, n, placement};
      sum += std::abs(volume_grid(ax, 0.0, p, g, {}, opts).volume /
                          AxisymField::exact_volume(p) -
                      1.0);
    }
    out.mean_error.push_back(sum / std::size(psis));
  }
  // least squares slope of log e against log(N^2)
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = sizes.size();
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::log(double(sizes[i]) * sizes[i]);
    const double y = std::log(out.mean_error[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.exponent = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
  return out;
}

CheckResult check_grid_convergence(const TracerOptions& opts) {
  const GridConvergence g = grid_convergence(NodePlacement::CellCentred, {25, 50, 100, 200, 400},
                                             opts);
  CheckResult r{"grid_convergence_exponent", g.exponent, 0.6, g.exponent >= 0.6, {}};
  r.detail = "errors";
  for (double e : g.mean_error) r.detail += fmt(" %.2e", e);
  return r;
}

std::vector<CheckResult> run_property_checks(const CheckOptions& opts) {
  std::vector<CheckResult> out;
  out.push_back(check_psi_conservation(opts.seed, opts.tracer));
  out.push_back(check_divergence(opts.seed));
  out.push_back(check_commutator(opts.seed));
  out.push_back(check_uline_start(opts.seed, opts.tracer));
  out.push_back(check_chart_round_trips(opts.seed));
  out.push_back(check_phi_identity(opts.seed));
  out.push_back(check_harmonic_convergence(10, opts.tracer));
  if (opts.include_grid) out.push_back(check_grid_convergence(opts.tracer));
  return out;
}

}  // namespace fluxvol
