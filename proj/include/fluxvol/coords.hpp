#pragma once

// Coordinate charts used by the two field models.
//
// Cartesian convention: x = R sin(phi), y = R cos(phi).
// Standard toroidal (r, theta, phi): R = R0 + r cos(theta), z = r sin(theta).
// Adapted toroidal (psi, vtheta, phi): psi is the toroidal flux through the
// poloidal disk of radius r, vtheta the straightened poloidal angle.
// Symplectic section (ytil, ztil): polar coordinates of sqrt(2 psi / B0)
// with angle vtheta, so that area equals toroidal flux / B0.

#include <array>
#include <stdexcept>

namespace fluxvol {

using Vec3 = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

namespace coords {

struct PointCyl {
  double R = 1.0;
  double phi = 0.0;
  double z = 0.0;
};

struct PointCartesian {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct PointTorStd {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct PointTorAdapted {
  double psi = 0.0;
  double vtheta = 0.0;
  double phi = 0.0;

  Vec3 as_vec() const { return {psi, vtheta, phi}; }
  static PointTorAdapted from_vec(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

struct PointSymplectic {
  double ytil = 0.0;
  double ztil = 0.0;
};

/// Volume factor plus the diagonal of a (covariant) metric.
struct MetricInfo {
  double sqrt_g = 1.0;
  std::array<double, 3> g_diag{1.0, 1.0, 1.0};
};

/// Geometry of the circular reference torus behind the adapted chart.
struct TorusGeometry {
  double B0 = 1.0;
  double R0 = 2.0;
};

/// Thrown when a point lies outside the domain of a chart map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// -- radial and angular maps of the adapted chart --------------------------

double psi_of_r(double r, double B0, double R0);
double r_of_psi(double psi, double B0, double R0);

/// Straightened poloidal angle. Works on unwrapped angles: the branch of
/// theta (multiple of 2 pi) is carried over to the result.
double vtheta_of_theta(double theta, double r, double R0);
double theta_of_vtheta(double vtheta, double r, double R0);

double R_of_adapted(const PointTorAdapted& p, const TorusGeometry& geo);

// -- chart conversions ------------------------------------------------------

PointTorAdapted adapted_of_standard(const PointTorStd& p,
                                    const TorusGeometry& geo);
PointTorStd standard_of_adapted(const PointTorAdapted& p,
                                const TorusGeometry& geo);

PointCyl cyl_of_standard(const PointTorStd& p, double R0);
PointTorStd standard_of_cyl(const PointCyl& p, double R0);

PointCyl cyl_of_adapted(const PointTorAdapted& p, const TorusGeometry& geo);
PointTorAdapted adapted_of_cyl(const PointCyl& p, const TorusGeometry& geo);

PointCartesian cartesian_of_cyl(const PointCyl& p);
PointCyl cyl_of_cartesian(const PointCartesian& p);

PointSymplectic symplectic_of_adapted(const PointTorAdapted& p, double B0);

struct AdaptedFromSymplectic {
  PointTorAdapted point;
  bool angle_defined = true;  ///< false at the origin, where vtheta is arbitrary
};

AdaptedFromSymplectic adapted_of_symplectic(const PointSymplectic& s, double B0,
                                            double phi = 0.0);

// -- metrics ------------------------------------------------------------------

/// Euclidean metric in standard toroidal coordinates, diag(1, r^2, R^2).
MetricInfo standard_metric(const PointTorStd& p, double R0);

/// Euclidean volume factor in the adapted chart, R^2 / (B0 R0).
double adapted_volume_factor(const PointTorAdapted& p, const TorusGeometry& geo);

/// Adapted chart: sqrt_g is the Euclidean volume factor R^2/(B0 R0); g_diag is
/// the auxiliary diagonal metric used for gradients,
/// ds^2 = dpsi^2/(2 B0 psi) + (2 psi/B0) dvtheta^2 + R0^2 dphi^2.
/// The auxiliary metric only needs to give i_n dPsi = 1, so its determinant
/// is not tied to sqrt_g.
MetricInfo adapted_metric(const PointTorAdapted& p, const TorusGeometry& geo);

/// Reduce an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace coords
}  // namespace fluxvol
