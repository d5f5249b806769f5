#include "doctest.h"

#include <cmath>
#include <random>

#include "fluxvol/coords.hpp"

using namespace fluxvol;
using namespace fluxvol::coords;

namespace {
const TorusGeometry kGeo{1.0, 2.0};
}

TEST_CASE("psi_of_r examples") {
  CHECK(psi_of_r(0.0, 1.0, 2.0) == 0.0);
  CHECK(psi_of_r(1.0, 1.0, 2.0) == doctest::Approx(4.0 * (1.0 - std::sqrt(3.0) / 2.0)).epsilon(1e-14));
  CHECK(psi_of_r(1.0, 1.0, 2.0) == doctest::Approx(0.535898).epsilon(1e-6));
  const double r = r_of_psi(0.02, 1.0, 2.0);
  CHECK(r == doctest::Approx(2.0 * std::sqrt(1.0 - std::pow(1.0 - 0.02 / 4.0, 2))).epsilon(1e-14));
  CHECK(std::abs(psi_of_r(r, 1.0, 2.0) - 0.02) <= 1e-14);
}

TEST_CASE("radial maps reject points off the chart") {
  CHECK_THROWS_AS(psi_of_r(-0.1, 1.0, 2.0), DomainError);
  CHECK_THROWS_AS(r_of_psi(5.0, 1.0, 2.0), DomainError);
}

TEST_CASE("vtheta_of_theta examples") {
  CHECK(vtheta_of_theta(0.0, 0.5, 2.0) == 0.0);
  CHECK(vtheta_of_theta(kPi, 0.5, 2.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(vtheta_of_theta(kPi / 2, 1.0, 2.0) == doctest::Approx(2.0 * std::atan(std::sqrt(1.0 / 3.0))).epsilon(1e-14));
  CHECK(vtheta_of_theta(kPi / 2, 1.0, 2.0) == doctest::Approx(1.047198).epsilon(1e-6));
  // the branch carries over for unwrapped angles
  CHECK(vtheta_of_theta(kPi / 2 + 4 * kPi, 1.0, 2.0) ==
        doctest::Approx(vtheta_of_theta(kPi / 2, 1.0, 2.0) + 4 * kPi).epsilon(1e-14));
  for (double th : {-3.0, -1.0, 0.3, 2.5, 7.0})
    CHECK(theta_of_vtheta(vtheta_of_theta(th, 0.7, 2.0), 0.7, 2.0) == doctest::Approx(th).epsilon(1e-13));
}

TEST_CASE("R_of_adapted examples") {
  const double psi1 = psi_of_r(1.0, 1.0, 2.0);
  CHECK(R_of_adapted({0.0, 1.3, 0.0}, kGeo) == doctest::Approx(2.0));
  CHECK(R_of_adapted({psi1, 0.0, 0.0}, kGeo) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(R_of_adapted({psi1, kPi / 2, 0.0}, kGeo) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("symplectic_of_adapted examples") {
  auto s = symplectic_of_adapted({0.02, 0.0, 0.0}, 1.0);
  CHECK(s.ytil == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(std::abs(s.ztil) < 1e-15);
  s = symplectic_of_adapted({0.02, kPi / 2, 0.0}, 1.0);
  CHECK(std::abs(s.ytil) < 1e-15);
  CHECK(s.ztil == doctest::Approx(0.2).epsilon(1e-14));

  const auto back = adapted_of_symplectic({0.570, 0.211}, 1.0);
  const auto again = symplectic_of_adapted(back.point, 1.0);
  CHECK(std::abs(again.ytil - 0.570) <= 1e-14);
  CHECK(std::abs(again.ztil - 0.211) <= 1e-14);
}

TEST_CASE("angle is undefined at the symplectic origin") {
  CHECK_FALSE(adapted_of_symplectic({0.0, 0.0}, 1.0).angle_defined);
  CHECK(adapted_of_symplectic({0.1, 0.0}, 1.0).angle_defined);
}

TEST_CASE("chart round trips over random points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  auto rel = [&](double a, double b) { worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a))); };
  auto ang = [&](double a, double b) { worst = std::max(worst, std::abs(wrap_angle(a - b))); };
  for (int i = 0; i < 1000; ++i) {
    const PointTorAdapted a{0.001 + 0.45 * U(rng), -kPi + kTwoPi * U(rng), -kPi + kTwoPi * U(rng)};
    const auto c = cyl_of_adapted(a, kGeo);
    const auto a2 = adapted_of_cyl(c, kGeo);
    rel(a.psi, a2.psi);
    ang(a.vtheta, a2.vtheta);
    ang(a.phi, a2.phi);

    const auto st = standard_of_adapted(a, kGeo);
    const auto a3 = adapted_of_standard(st, kGeo);
    rel(a.psi, a3.psi);
    ang(a.vtheta, a3.vtheta);

    const auto s = symplectic_of_adapted(a, kGeo.B0);
    const auto a4 = adapted_of_symplectic(s, kGeo.B0, a.phi).point;
    rel(a.psi, a4.psi);
    ang(a.vtheta, a4.vtheta);

    const auto c2 = cyl_of_cartesian(cartesian_of_cyl(c));
    rel(c.R, c2.R);
    rel(c.z, c2.z);
    ang(c.phi, c2.phi);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("symplectic area element is 1/B0") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (double B0 : {1.0, 2.5}) {
    for (int i = 0; i < 50; ++i) {
      const double psi = 0.01 + 0.3 * U(rng);
      const double vt = kTwoPi * U(rng);
      const double h = 1e-6;
      auto map = [&](double p, double v) { return symplectic_of_adapted({p, v, 0.0}, B0); };
      const auto dp1 = map(psi + h, vt), dp0 = map(psi - h, vt);
      const auto dv1 = map(psi, vt + h), dv0 = map(psi, vt - h);
      const double J = ((dp1.ytil - dp0.ytil) * (dv1.ztil - dv0.ztil) -
                        (dp1.ztil - dp0.ztil) * (dv1.ytil - dv0.ytil)) /
                       (4 * h * h);
      CHECK(J == doctest::Approx(1.0 / B0).epsilon(1e-8));
    }
  }
}

TEST_CASE("adapted volume factor is R^2 / (B0 R0)") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const PointTorAdapted p{0.4 * U(rng), kTwoPi * U(rng), kTwoPi * U(rng)};
    const double R = R_of_adapted(p, kGeo);
    CHECK(adapted_metric(p, kGeo).sqrt_g == doctest::Approx(R * R / 2.0).epsilon(1e-12));
    CHECK(adapted_volume_factor(p, kGeo) == doctest::Approx(R * R / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("standard metric is diag(1, r^2, R^2)") {
  const auto m = standard_metric({0.5, 0.3, 0.0}, 2.0);
  const double R = 2.0 + 0.5 * std::cos(0.3);
  CHECK(m.g_diag[1] == doctest::Approx(0.25));
  CHECK(m.g_diag[2] == doctest::Approx(R * R));
  CHECK(m.sqrt_g == doctest::Approx(0.5 * R));
}

TEST_CASE("wrap_angle range") {
  CHECK(wrap_angle(kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_angle(3 * kTwoPi + 0.5) == doctest::Approx(0.5));
}
