#include "doctest.h"

#include <cmath>
#include <random>

#include "fluxvol/parallel.hpp"
#include "fluxvol/tables.hpp"
#include "fluxvol/volume.hpp"

using namespace fluxvol;

namespace {

const HelicalField& field() {
  static const HelicalField f;
  return f;
}

const CriticalSet& crit() {
  static const CriticalSet c = find_critical_points(field());
  return c;
}

std::pair<double, double> bounds(int row) {
  return table2_bounds(field(), crit(), table2_intervals()[row]);
}

double rel(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::Grid, Method::Contour, Method::Thm1, Method::Thm3p, Method::Thm4})
    CHECK(method_from_string(to_string(m)) == m);
  CHECK_THROWS(method_from_string("eq19"));
}

TEST_CASE("trapezoid of a constant is exact") {
  const PsiLadder L = make_ladder(0.0, 0.08, 16, Region::Inner, {});
  const VolumeProfile p = integrate_profile(L, std::vector<double>(L.values.size(), 4 * kPi * kPi));
  CHECK(p.total() == doctest::Approx(4 * kPi * kPi * 0.08).epsilon(1e-14));
  for (const auto& r : p.rows) CHECK(r.V_cum == doctest::Approx(4 * kPi * kPi * r.Psi).epsilon(1e-13).scale(1e-14));
}

TEST_CASE("single-interval ladder") {
  SingularSurfaces none{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const PsiLadder L = make_ladder(0.1, 0.3, 1, Region::Inner, none);
  REQUIRE(L.values.size() == 2);
  const VolumeProfile p = integrate_profile(L, {2.0, 5.0});
  CHECK(p.total() == doctest::Approx(0.5 * (2.0 + 5.0) * 0.2));
}

TEST_CASE("NaN samples are rejected") {
  const PsiLadder L = make_ladder(0.0, 0.1, 2, Region::Inner, {});
  CHECK_THROWS_AS(integrate_profile(L, {1.0, NAN, 1.0}), NumericalError);
  CHECK_THROWS(integrate_profile(L, {1.0, 1.0}));
}

TEST_CASE("ladders count outward from the region reference") {
  SingularSurfaces s{0.0, -0.0248};
  const PsiLadder inner = make_ladder(0.0, -0.006, 4, Region::Inner, s);
  CHECK(inner.values.front() == 0.0);
  CHECK(inner.values.back() == -0.006);
  CHECK(inner.extrapolated.front());
  CHECK(inner.sample_at.front() < 0.0);
  CHECK_FALSE(inner.extrapolated.back());

  SingularSurfaces outer{std::numeric_limits<double>::quiet_NaN(), -0.0248};
  const PsiLadder o = make_ladder(0.0172, -0.0248, 10, Region::Outer, outer);
  CHECK(o.values.front() == -0.0248);
  CHECK(o.log_panel.front());
  CHECK(o.sample_at.front() == doctest::Approx(-0.0248 + o.separatrix_clip));
  CHECK(o.separatrix_clip == doctest::Approx(1e-4 * 0.042));

  const PsiLadder d = make_ladder(0.0172, -0.0248, 10, Region::Outer, outer, 1e-5, EndpointPolicy::Direct);
  CHECK_FALSE(d.extrapolated.front());
  CHECK(d.separatrix_clip == 1e-5);

  CHECK_THROWS(make_ladder(0.1, 0.1, 4, Region::Inner, s));
  CHECK_THROWS(make_ladder(0.0, 0.1, 0, Region::Inner, s));
}

TEST_CASE("Thm1 on the axisymmetric field") {
  const AxisymField f;
  MethodOptions mo;
  const double v02 = compute_profile(f, nullptr, Method::Thm1, Region::Inner, 0.0, 0.02, 20, mo).total();
  CHECK(rel(v02, 0.789548) <= 1e-4);
  CHECK(rel(v02, AxisymField::exact_volume(0.02)) <= 1e-10);
  const double v18 = compute_profile(f, nullptr, Method::Thm1, Region::Inner, 0.0, 0.18, 20, mo).total();
  CHECK(rel(v18, 7.106088) <= 1e-4);
  CHECK(dVdPsi_thm1(f, {1.3, 0.0, 0.0}) == doctest::Approx(4 * kPi * kPi).epsilon(1e-10));
}

TEST_CASE("Thm3' with unit density reduces to Thm1 on the axisymmetric field") {
  const AxisymField f;
  const Thm3pSample s = dVdPsi_thm3p(f, {1.25, 0.0, 0.0}, 6, true);
  CHECK(s.dVdPsi == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
  CHECK(dVdPsi_thm4(f, {1.25, 0.0, 0.0}, 3) == doctest::Approx(4 * kPi * kPi).epsilon(1e-9));
}

TEST_CASE("grid sum with the published node placement") {
  const AxisymField f;
  const GridSpec g300{1.0, 0.0, 0.9, 0.9, 300, 300, NodePlacement::Endpoints};
  const double v = volume_grid(f, 0.0, 0.02, g300).volume;
  CHECK(rel(v, 0.782214) <= 1e-3);
  CHECK(rel(v, AxisymField::exact_volume(0.02)) == doctest::Approx(0.009).epsilon(0.1));
  const GridSpec g200{1.0, 0.0, 0.9, 0.9, 200, 200, NodePlacement::Endpoints};
  CHECK(rel(volume_grid(f, 0.0, 0.32, g200).volume, 12.488658) <= 1e-3);

  const auto [a, b] = bounds(0);
  const GridSpec gi{0.0, 0.0, 0.335, 0.47, 300, 300, NodePlacement::Endpoints};
  auto inner = [&](const Vec3& x) { return classify(field(), crit(), x).region == Region::Inner; };
  CHECK(rel(volume_grid(field(), b, a, gi, inner).volume, 0.997447) <= 1e-3);
}

TEST_CASE("cell-centred grid converges on the exact volume") {
  const AxisymField f;
  double prev = 1.0;
  for (int n : {25, 100, 400}) {
    const GridSpec g{1.0, 0.0, 0.9, 0.9, n, n};
    const double e = rel(volume_grid(f, 0.0, 0.05, g).volume, AxisymField::exact_volume(0.05));
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("grid nodes and cell area") {
  const GridSpec c{0.0, 0.0, 1.0, 2.0, 4, 8};
  CHECK(c.node_x(0) == doctest::Approx(-0.75));
  CHECK(c.node_y(7) == doctest::Approx(1.75));
  CHECK(c.cell_area() == doctest::Approx(8.0 / 32.0));
  const GridSpec e{0.0, 0.0, 1.0, 1.0, 5, 5, NodePlacement::Endpoints};
  CHECK(e.node_x(0) == doctest::Approx(-1.0));
  CHECK(e.node_x(4) == doctest::Approx(1.0));
  CHECK_THROWS(GridSpec{0.0, 0.0, 1.0, 1.0, 1, 5}.validate());
}

TEST_CASE("empty grid band gives zero") {
  const GridSpec g{0.0, 0.0, 0.335, 0.47, 50, 50};
  const GridResult r = volume_grid(field(), 0.0, 0.0, g);
  CHECK(r.empty());
  CHECK(r.volume == 0.0);
}

TEST_CASE("contour method on the axisymmetric field") {
  const AxisymField f;
  MethodOptions mo;
  mo.n_contour = 50;
  const double v = compute_profile(f, nullptr, Method::Contour, Region::Inner, 0.0, 0.02, 50, mo).total();
  CHECK(rel(v, 0.787261) <= 5e-4);
  // dV/dPsi tends to 4 pi^2 as the contour is refined
  double prev = 1.0;
  for (int ng : {25, 100, 400}) {
    const double d = dVdPsi_contour(f, extract_contour(f, 0.05, ng));
    const double e = rel(d, 4 * kPi * kPi);
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("a collapsed contour contributes nothing") {
  const LevelSetContour lc = extract_contour(field(), crit(), 0.0, Region::Inner, 20);
  CHECK(dVdPsi_contour(field(), lc) == doctest::Approx(0.0).scale(1.0));
}

// Printed values are checked against the 0.5% band where they are
// reproducible and against the 2% cross-method band where the printed
// value itself sits off the converged volume (see the acceptance suite).
TEST_CASE("helical inner interval") {
  const auto [a, b] = bounds(0);
  MethodOptions mo;
  CHECK(rel(compute_profile(field(), &crit(), Method::Contour, Region::Inner, a, b, 100, mo).total(), 1.002811) <= 5e-3);
  CHECK(rel(compute_profile(field(), &crit(), Method::Thm4, Region::Inner, a, b, 100, mo).total(), 1.003619) <= 5e-3);
  CHECK(rel(compute_profile(field(), &crit(), Method::Thm3p, Region::Inner, a, b, 100, mo).total(), 1.013366) <= 2e-2);
}

TEST_CASE("helical island and outer intervals") {
  MethodOptions mo;
  const auto [ia, ib] = bounds(2);
  CHECK(rel(compute_profile(field(), &crit(), Method::Thm3p, Region::Island, ia, ib, 100, mo).total(), 0.155206) <= 5e-3);
  const auto [oa, ob] = bounds(5);
  CHECK(rel(compute_profile(field(), &crit(), Method::Thm4, Region::Outer, oa, ob, 100, mo).total(), 7.909134) <= 2e-2);
}

TEST_CASE("profiles increase along every region ladder") {
  MethodOptions mo;
  for (int row = 0; row < 6; ++row) {
    const auto& iv = table2_intervals()[row];
    const auto [a, b] = bounds(row);
    const VolumeProfile p = compute_profile(field(), &crit(), Method::Thm3p, iv.region, a, b, 40, mo);
    for (std::size_t k = 1; k < p.rows.size(); ++k) CHECK(p.rows[k].V_cum > p.rows[k - 1].V_cum);
  }
}

TEST_CASE("volume converges as the separatrix clip is halved") {
  MethodOptions mo;
  const auto [a, b] = bounds(4);
  const double h = std::abs(b - a) / 100;
  std::vector<double> v;
  for (double clip = h / 4; clip > h / 512; clip /= 2)
    v.push_back(compute_profile(field(), &crit(), Method::Thm3p, Region::Outer, a, b, 100, mo, clip).total());
  const double first = std::abs(v[1] - v[0]);
  const double last = std::abs(v.back() - v[v.size() - 2]);
  CHECK(last < first);
  CHECK(last < 1e-6 * v.back());
  // sampling the clipped point as is keeps growing with log(1/clip)
  std::vector<double> d;
  for (double clip : {h / 4, h / 8, h / 16})
    d.push_back(compute_profile(field(), &crit(), Method::Thm3p, Region::Outer, a, b, 100, mo, clip,
                                EndpointPolicy::Direct).total());
  CHECK(std::abs(d[2] - d[1]) == doctest::Approx(std::abs(d[1] - d[0])).epsilon(0.2));
}

TEST_CASE("intervals outside the region are refused") {
  MethodOptions mo;
  CHECK_THROWS(compute_profile(field(), &crit(), Method::Thm3p, Region::Island, -0.01, -0.02, 10, mo));
  CHECK_THROWS(dVdPsi_at(field(), &crit(), Method::Grid, Region::Inner, -0.01, mo));
  CHECK_THROWS(dVdPsi_at(field(), &crit(), Method::Thm1, Region::Inner, -0.01, mo));
  CHECK_THROWS(dVdPsi_at(field(), nullptr, Method::Thm3p, Region::Inner, -0.01, mo));
}

TEST_CASE("flux along a u-line is -2 pi Psi") {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 x{0.01 + 0.4 * U(rng), kTwoPi * U(rng), kTwoPi * U(rng)};
    CHECK(phi_flux(field(), x) == doctest::Approx(-kTwoPi * field().psi_label(x)).epsilon(1e-8));
  }
  // the axisymmetric label has the opposite orientation
  const AxisymField ax;
  CHECK(phi_flux(ax, {1.2, 0.0, 0.0}) == doctest::Approx(kTwoPi * 0.02).epsilon(1e-12));
}

TEST_CASE("profiles do not depend on the thread count") {
  MethodOptions mo;
  const auto [a, b] = bounds(3);
  set_thread_count(1);
  const VolumeProfile p1 = compute_profile(field(), &crit(), Method::Thm3p, Region::Island, a, b, 30, mo);
  set_thread_count(4);
  const VolumeProfile p4 = compute_profile(field(), &crit(), Method::Thm3p, Region::Island, a, b, 30, mo);
  set_thread_count(0);
  REQUIRE(p1.rows.size() == p4.rows.size());
  for (std::size_t k = 0; k < p1.rows.size(); ++k) CHECK(p1.rows[k].V_cum == p4.rows[k].V_cum);
}

TEST_CASE("parallel_for rethrows and visits every index") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 7) throw std::runtime_error("x"); }),
                  std::runtime_error);
}
