#include "fluxvol/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

namespace fluxvol {

namespace {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<double, 4>;  // row major

double psi_cap(const HelicalField& field) {
  return 0.5 * field.params().B0 * field.params().R0 * field.params().R0;
}

double section_psi(const HelicalField& field, double y, double z) {
  return field.psi_label(field.from_section(y, z));
}

Vec2 section_gradient(const HelicalField& field, double y, double z) {
  const double rho2 = y * y + z * z;
  if (rho2 == 0.0) return {0.0, 0.0};
  const double B0 = field.params().B0;
  const Vec3 g = field.psi_gradient(field.from_section(y, z));
  return {g[0] * B0 * y - g[1] * z / rho2, g[0] * B0 * z + g[1] * y / rho2};
}

Mat2 section_hessian(const HelicalField& field, double y, double z) {
  constexpr double h = 1e-6;
  const Vec2 gyp = section_gradient(field, y + h, z);
  const Vec2 gym = section_gradient(field, y - h, z);
  const Vec2 gzp = section_gradient(field, y, z + h);
  const Vec2 gzm = section_gradient(field, y, z - h);
  const double hyy = (gyp[0] - gym[0]) / (2 * h);
  const double hzz = (gzp[1] - gzm[1]) / (2 * h);
  const double hyz = 0.5 * ((gyp[1] - gym[1]) + (gzp[0] - gzm[0])) / (2 * h);
  return {hyy, hyz, hyz, hzz};
}

std::optional<Vec2> newton_critical(const HelicalField& field, Vec2 p) {
  constexpr double kMaxStep = 0.05;
  for (int it = 0; it < 100; ++it) {
    const Vec2 g = section_gradient(field, p[0], p[1]);
    if (std::hypot(g[0], g[1]) < 1e-14) return p;
    const Mat2 H = section_hessian(field, p[0], p[1]);
    const double det = H[0] * H[3] - H[1] * H[2];
    if (det == 0.0) return std::nullopt;
    Vec2 step{-(H[3] * g[0] - H[1] * g[1]) / det, -(-H[2] * g[0] + H[0] * g[1]) / det};
    const double len = std::hypot(step[0], step[1]);
    if (len > kMaxStep) {
      step[0] *= kMaxStep / len;
      step[1] *= kMaxStep / len;
    }
    p[0] += step[0];
    p[1] += step[1];
    if (len < 1e-15) break;
  }
  const Vec2 g = section_gradient(field, p[0], p[1]);
  if (std::hypot(g[0], g[1]) < 1e-11) return p;
  return std::nullopt;
}

double positive_angle(double y, double z) {
  double a = std::atan2(z, y);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi - 1e-9 ? 0.0 : a;
}

double solve_bracket(const std::function<double(double)>& g, double a, double b) {
  const double ga = g(a);
  const double gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga > 0.0) == (gb > 0.0)) {
    throw coords::DomainError("ray misses the level set");
  }
  std::uintmax_t iters = 200;
  boost::math::tools::eps_tolerance<double> tol(52);
  const auto [lo, hi] = boost::math::tools::toms748_solve(g, a, b, ga, gb, tol, iters);
  return 0.5 * (lo + hi);
}

bool has_extra_roots(const std::function<double(double)>& g, double a, double b) {
  constexpr int kSamples = 64;
  int changes = 0;
  double prev = g(a);
  for (int i = 1; i <= kSamples; ++i) {
    const double cur = g(a + (b - a) * i / kSamples);
    if (cur != 0.0 && prev != 0.0 && (cur > 0.0) != (prev > 0.0)) ++changes;
    if (cur != 0.0) prev = cur;
  }
  return changes > 1;
}

// Root of Psi = Psi0 along the ray vtheta at phi = 0, on the inner
// (psi < psi_min) or outer branch.
double ray_root(const HelicalField& field, double vtheta, double Psi0, bool inner,
                bool* multiple) {
  const double pm = ray_minimum_psi(field, vtheta, 0.0);
  auto g = [&](double psi) { return field.psi_label({psi, vtheta, 0.0}) - Psi0; };
  const double a = inner ? 0.0 : pm;
  const double b = inner ? pm : psi_cap(field);
  const double root = solve_bracket(g, a, b);
  if (multiple && has_extra_roots(g, a, b)) *multiple = true;
  return root;
}

struct IslandFrame {
  double psi_o;
  double vtheta_o;
  double half_vtheta;
  double half_psi;
};

IslandFrame island_frame(const HelicalField& field, const CriticalSet& crit,
                         const CriticalPoint& o) {
  const Vec3 c = field.from_section(o.ytil, o.ztil);
  auto g = [&](double psi) {
    return field.psi_label({psi, c[1], 0.0}) - crit.psi_sep;
  };
  const double in = solve_bracket(g, 0.0, c[0]);
  const double out = solve_bracket(g, c[0], psi_cap(field));
  return {c[0], c[1], kPi / field.params().m, std::max(c[0] - in, out - c[0])};
}

std::vector<Vec3> island_loop(const HelicalField& field, const IslandFrame& fr,
                              double Psi0, int n_nodes) {
  constexpr int kMarch = 128;
  constexpr double kReach = 1.5;
  std::vector<Vec3> loop;
  loop.reserve(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double alpha = kTwoPi * j / n_nodes;
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    auto at = [&](double s) -> Vec3 {
      return {std::max(0.0, fr.psi_o + s * fr.half_psi * sa),
              fr.vtheta_o + s * fr.half_vtheta * ca, 0.0};
    };
    auto g = [&](double s) { return field.psi_label(at(s)) - Psi0; };
    double prev = 0.0;
    double root = -1.0;
    for (int k = 1; k <= kMarch; ++k) {
      const double s = kReach * k / kMarch;
      if (g(s) >= 0.0) {
        root = solve_bracket(g, prev, s);
        break;
      }
      prev = s;
    }
    if (root < 0.0) throw coords::DomainError("island ray misses the level set");
    loop.push_back(at(root));
  }
  return loop;
}

}  // namespace

std::string_view to_string(Region r) {
  switch (r) {
    case Region::Inner:
      return "inner";
    case Region::Island:
      return "island";
    case Region::Outer:
      return "outer";
  }
  return "?";
}

Region region_from_string(std::string_view s) {
  if (s == "inner") return Region::Inner;
  if (s == "island") return Region::Island;
  if (s == "outer") return Region::Outer;
  throw std::invalid_argument("unknown region '" + std::string(s) + "'");
}

double ray_minimum_psi(const HelicalField& field, double vtheta, double phi) {
  auto f = [&](double psi) { return field.psi_label({psi, vtheta, phi}); };
  std::uintmax_t iters = 500;
  const auto r = boost::math::tools::brent_find_minima(
      f, 0.0, psi_cap(field), std::numeric_limits<double>::digits / 2, iters);
  return r.first;
}

CriticalSet find_critical_points(const HelicalField& field,
                                 const CriticalSearchOptions& opts) {
  CriticalSet out;
  const int n = std::max(2, opts.seeds_per_axis);
  std::vector<Vec2> found;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vec2 seed{-opts.extent + 2.0 * opts.extent * i / (n - 1),
                      -opts.extent + 2.0 * opts.extent * j / (n - 1)};
      const auto p = newton_critical(field, seed);
      if (!p) continue;
      const double rho = std::hypot((*p)[0], (*p)[1]);
      if (rho < 1e-6 || rho > 1.5 * opts.extent * std::sqrt(2.0)) continue;
      const bool dup = std::any_of(found.begin(), found.end(), [&](const Vec2& q) {
        return std::hypot(q[0] - (*p)[0], q[1] - (*p)[1]) < opts.dedupe;
      });
      if (!dup) found.push_back(*p);
    }
  }

  for (const Vec2& p : found) {
    const Mat2 H = section_hessian(field, p[0], p[1]);
    const double det = H[0] * H[3] - H[1] * H[2];
    const double scale = H[0] * H[0] + H[3] * H[3] + 2.0 * H[1] * H[1];
    if (std::abs(det) <= 1e-6 * scale) continue;
    const CriticalPoint cp{p[0], p[1], section_psi(field, p[0], p[1])};
    (det > 0.0 ? out.o_points : out.x_points).push_back(cp);
  }
  auto by_angle = [](const CriticalPoint& a, const CriticalPoint& b) {
    return positive_angle(a.ytil, a.ztil) < positive_angle(b.ytil, b.ztil);
  };
  std::sort(out.o_points.begin(), out.o_points.end(), by_angle);
  std::sort(out.x_points.begin(), out.x_points.end(), by_angle);

  if (out.has_island()) {
    out.psi_o = out.o_points.front().Psi;
    for (const auto& o : out.o_points) out.psi_o = std::min(out.psi_o, o.Psi);
    if (out.x_points.empty()) throw std::runtime_error("island without X-points");
    double sum = 0.0;
    for (const auto& x : out.x_points) sum += x.Psi;
    out.psi_sep = sum / static_cast<double>(out.x_points.size());
  } else {
    out.psi_sep = field.psi_label({ray_minimum_psi(field, 0.0, 0.0), 0.0, 0.0});
  }
  return out;
}

PsiInterval region_interval(const CriticalSet& crit, Region region) {
  switch (region) {
    case Region::Inner:
      return {crit.psi_sep, crit.psi_axis};
    case Region::Island:
      if (!crit.has_island()) throw std::invalid_argument("field has no island");
      return {crit.psi_o, crit.psi_sep};
    case Region::Outer:
      return {crit.psi_sep, std::numeric_limits<double>::infinity()};
  }
  return {0.0, 0.0};
}

bool snap_to_region(const CriticalSet& crit, Region region, double& Psi, double tol) {
  const PsiInterval iv = region_interval(crit, region);
  if (Psi < iv.lo && Psi >= iv.lo - tol) {
    Psi = iv.lo;
    return true;
  }
  if (Psi > iv.hi && Psi <= iv.hi + tol) {
    Psi = iv.hi;
    return true;
  }
  return false;
}

Classification classify(const HelicalField& field, const CriticalSet& crit,
                        const Vec3& x) {
  const double Psi = field.psi_label(x);
  Classification c;
  c.boundary = std::abs(Psi - crit.psi_sep) <= 1e-9;
  if (crit.has_island() && Psi < crit.psi_sep) {
    c.region = Region::Island;
  } else {
    c.region = x[0] < ray_minimum_psi(field, x[1], x[2]) ? Region::Inner : Region::Outer;
  }
  return c;
}

LevelSetContour extract_contour(const AxisymField& field, double Psi0, int n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("contour needs at least 3 nodes");
  if (!(Psi0 >= 0.0) || !(Psi0 < 0.5 * field.params().r0 * field.params().r0)) {
    throw coords::DomainError("Psi0 outside the axisymmetric domain");
  }
  LevelSetContour c;
  c.region = Region::Inner;
  c.Psi0 = Psi0;
  std::vector<Vec3> loop;
  loop.reserve(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double th = kTwoPi * j / n_nodes;
    const double ct = std::cos(th);
    const double st = std::sin(th);
    auto g = [&](double r) {
      return field.psi_label({1.0 + r * ct, 0.0, r * st}) - Psi0;
    };
    const double r = Psi0 == 0.0 ? 0.0 : solve_bracket(g, 0.0, field.params().r0);
    loop.push_back({1.0 + r * ct, 0.0, r * st});
  }
  c.loops.push_back(std::move(loop));
  return c;
}

LevelSetContour extract_contour(const HelicalField& field, const CriticalSet& crit,
                                double Psi0, Region region, int n_nodes) {
  if (n_nodes < 3) throw std::invalid_argument("contour needs at least 3 nodes");
  LevelSetContour c;
  c.region = region;
  c.Psi0 = Psi0;
  if (region == Region::Island) {
    if (!crit.has_island()) throw std::invalid_argument("field has no island");
    if (Psi0 < crit.psi_o || Psi0 >= crit.psi_sep) {
      throw coords::DomainError("Psi0 outside the island interval");
    }
    for (const auto& o : crit.o_points) {
      const IslandFrame fr = island_frame(field, crit, o);
      if (Psi0 <= o.Psi) {
        c.loops.emplace_back(n_nodes, Vec3{fr.psi_o, fr.vtheta_o, 0.0});
      } else {
        c.loops.push_back(island_loop(field, fr, Psi0, n_nodes));
      }
    }
    return c;
  }

  const bool inner = region == Region::Inner;
  if (inner && Psi0 == crit.psi_axis) {
    c.loops.emplace_back(n_nodes, Vec3{0.0, 0.0, 0.0});
    return c;
  }
  std::vector<Vec3> loop;
  loop.reserve(n_nodes);
  for (int j = 0; j < n_nodes; ++j) {
    const double vt = kTwoPi * j / n_nodes;
    const double psi = ray_root(field, vt, Psi0, inner, &c.multiple_roots);
    loop.push_back({psi, vt, 0.0});
  }
  c.loops.push_back(std::move(loop));
  return c;
}

Vec3 surface_seed(const HelicalField& field, const CriticalSet& crit, double Psi0,
                  Region region) {
  if (region == Region::Island) {
    if (!crit.has_island()) throw std::invalid_argument("field has no island");
    const CriticalPoint& o = crit.o_points.front();
    const Vec3 c = field.from_section(o.ytil, o.ztil);
    auto g = [&](double psi) { return field.psi_label({psi, c[1], 0.0}) - Psi0; };
    const double pm = ray_minimum_psi(field, c[1], 0.0);
    return {solve_bracket(g, 0.0, pm), c[1], 0.0};
  }
  return {ray_root(field, 0.0, Psi0, region == Region::Inner, nullptr), 0.0, 0.0};
}

Vec3 surface_seed(const AxisymField&, double Psi0) {
  if (!(Psi0 > 0.0)) throw coords::DomainError("Psi0 must be positive");
  return {1.0 + std::sqrt(2.0 * Psi0), 0.0, 0.0};
}

LatticeGenerators lattice_generators(const FieldModel& field, const Vec3& x0,
                                     const TracerOptions& opts,
                                     const UlineOptions& uopts) {
  const CrossingEvent ev = return_to_uline(field, FlowField::V, x0, uopts, opts);
  LatticeGenerators gen;
  gen.T1 = {field.uline_period(), 0.0};
  gen.T2 = {0.0, ev.t};
  gen.Delta = std::abs(gen.T1[0] * gen.T2[1] - gen.T1[1] * gen.T2[0]);
  return gen;
}

HarmonicAverage harmonic_average_rho(const FieldModel& field, const Vec3& x0,
                                     const LatticeGenerators& gen, int q,
                                     const TracerOptions& opts) {
  if (q < 2) throw std::invalid_argument("harmonic average needs q >= 2");
  double t_max = 0.0;
  for (int n1 = 0; n1 < q; ++n1) {
    for (int n2 = 0; n2 < q; ++n2) {
      t_max = std::max(t_max, (n1 * gen.T1[1] + n2 * gen.T2[1]) / q);
    }
  }
  TracerOptions o = opts;
  o.max_time = std::max(o.max_time, 1.01 * t_max + 1.0);
  Trajectory traj(field, FlowField::V, x0, o);
  traj.extend_to(t_max);

  double sum = 0.0;
  for (int n2 = 0; n2 < q; ++n2) {
    for (int n1 = 0; n1 < q; ++n1) {
      const double tv = (n1 * gen.T1[1] + n2 * gen.T2[1]) / q;
      const double tu = (n1 * gen.T1[0] + n2 * gen.T2[0]) / q;
      sum += 1.0 / field.density(field.u_flow(traj.state(tv), tu));
    }
  }
  HarmonicAverage h;
  h.inv_rho_mean = sum / (q * q);
  h.rho_hat = 1.0 / h.inv_rho_mean;
  return h;
}

}  // namespace fluxvol
