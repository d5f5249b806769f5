#include "fluxvol/coords.hpp"

#include <cmath>
#include <string>

namespace fluxvol::coords {

namespace {

void require_minor_radius(double r, double R0) {
  if (!(r >= 0.0) || !(r < R0)) {
    throw DomainError("minor radius r=" + std::to_string(r) +
                      " outside [0, R0=" + std::to_string(R0) + ")");
  }
}

// Number of full turns to remove so that the remainder is in [-pi, pi].
double branch_of(double angle) { return std::round(angle / kTwoPi); }

}  // namespace

double wrap_angle(double a) {
  double w = std::remainder(a, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

double psi_of_r(double r, double B0, double R0) {
  require_minor_radius(r, R0);
  const double s = r / R0;
  // 1 - sqrt(1 - s^2) written without cancellation for small s.
  const double one_minus_root = s * s / (1.0 + std::sqrt(1.0 - s * s));
  return B0 * R0 * R0 * one_minus_root;
}

double r_of_psi(double psi, double B0, double R0) {
  const double psi_max = B0 * R0 * R0;
  if (!(psi >= 0.0) || !(psi < psi_max)) {
    throw DomainError("toroidal flux psi=" + std::to_string(psi) +
                      " outside [0, B0 R0^2)");
  }
  const double a = psi / psi_max;
  // 1 - (1 - a)^2 = a (2 - a)
  return R0 * std::sqrt(a * (2.0 - a));
}

double vtheta_of_theta(double theta, double r, double R0) {
  require_minor_radius(r, R0);
  const double k = std::sqrt((R0 - r) / (R0 + r));
  const double turns = branch_of(theta);
  const double t = theta - turns * kTwoPi;
  const double half = 0.5 * t;
  return 2.0 * std::atan2(k * std::sin(half), std::cos(half)) + turns * kTwoPi;
}

double theta_of_vtheta(double vtheta, double r, double R0) {
  require_minor_radius(r, R0);
  const double k = std::sqrt((R0 - r) / (R0 + r));
  const double turns = branch_of(vtheta);
  const double t = vtheta - turns * kTwoPi;
  const double half = 0.5 * t;
  return 2.0 * std::atan2(std::sin(half), k * std::cos(half)) + turns * kTwoPi;
}

double R_of_adapted(const PointTorAdapted& p, const TorusGeometry& geo) {
  const double r = r_of_psi(p.psi, geo.B0, geo.R0);
  return (geo.R0 * geo.R0 - r * r) / (geo.R0 - r * std::cos(p.vtheta));
}

PointTorAdapted adapted_of_standard(const PointTorStd& p,
                                    const TorusGeometry& geo) {
  return {psi_of_r(p.r, geo.B0, geo.R0), vtheta_of_theta(p.theta, p.r, geo.R0),
          p.phi};
}

PointTorStd standard_of_adapted(const PointTorAdapted& p,
                                const TorusGeometry& geo) {
  const double r = r_of_psi(p.psi, geo.B0, geo.R0);
  return {r, theta_of_vtheta(p.vtheta, r, geo.R0), p.phi};
}

PointCyl cyl_of_standard(const PointTorStd& p, double R0) {
  return {R0 + p.r * std::cos(p.theta), p.phi, p.r * std::sin(p.theta)};
}

PointTorStd standard_of_cyl(const PointCyl& p, double R0) {
  const double dr = p.R - R0;
  return {std::hypot(dr, p.z), std::atan2(p.z, dr), p.phi};
}

PointCyl cyl_of_adapted(const PointTorAdapted& p, const TorusGeometry& geo) {
  return cyl_of_standard(standard_of_adapted(p, geo), geo.R0);
}

PointTorAdapted adapted_of_cyl(const PointCyl& p, const TorusGeometry& geo) {
  return adapted_of_standard(standard_of_cyl(p, geo.R0), geo);
}

PointCartesian cartesian_of_cyl(const PointCyl& p) {
  return {p.R * std::sin(p.phi), p.R * std::cos(p.phi), p.z};
}

PointCyl cyl_of_cartesian(const PointCartesian& p) {
  return {std::hypot(p.x, p.y), std::atan2(p.x, p.y), p.z};
}

PointSymplectic symplectic_of_adapted(const PointTorAdapted& p, double B0) {
  if (p.psi < 0.0) throw DomainError("negative toroidal flux");
  const double rho = std::sqrt(2.0 * p.psi / B0);
  return {rho * std::cos(p.vtheta), rho * std::sin(p.vtheta)};
}

AdaptedFromSymplectic adapted_of_symplectic(const PointSymplectic& s, double B0,
                                            double phi) {
  const double rho2 = s.ytil * s.ytil + s.ztil * s.ztil;
  if (rho2 == 0.0) return {{0.0, 0.0, phi}, false};
  return {{0.5 * B0 * rho2, std::atan2(s.ztil, s.ytil), phi}, true};
}

MetricInfo standard_metric(const PointTorStd& p, double R0) {
  const double R = R0 + p.r * std::cos(p.theta);
  return {p.r * R, {1.0, p.r * p.r, R * R}};
}

double adapted_volume_factor(const PointTorAdapted& p, const TorusGeometry& geo) {
  const double R = R_of_adapted(p, geo);
  return R * R / (geo.B0 * geo.R0);
}

MetricInfo adapted_metric(const PointTorAdapted& p, const TorusGeometry& geo) {
  return {adapted_volume_factor(p, geo),
          {1.0 / (2.0 * geo.B0 * p.psi), 2.0 * p.psi / geo.B0, geo.R0 * geo.R0}};
}

}  // namespace fluxvol::coords
