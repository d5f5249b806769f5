#pragma once

// Analytic integrable field models.
//
// Every model lives in one chart and exposes, at a chart point x:
//   b_contra   contravariant components of B
//   psi_label  the flux label Psi (constant along B and along u)
//   a_cov      covariant components of the vector potential
//   density    rho, preserved by the symmetry field u
//   u_contra   contravariant components of u
//   sqrt_g     Euclidean volume factor of the chart

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "fluxvol/coords.hpp"

namespace fluxvol {

enum class Chart {
  Cylindrical,      ///< (R, phi, z)
  AdaptedToroidal,  ///< (psi, vtheta, phi)
};

enum class FieldKind { Axisymmetric, Helical };

class FieldModel {
 public:
  virtual ~FieldModel() = default;

  virtual FieldKind kind() const = 0;
  virtual Chart chart() const = 0;
  virtual std::string_view name() const = 0;

  virtual Vec3 b_contra(const Vec3& x) const = 0;
  virtual double psi_label(const Vec3& x) const = 0;
  /// Covariant gradient dPsi/dx^i.
  virtual Vec3 psi_gradient(const Vec3& x) const = 0;
  virtual Vec3 a_cov(const Vec3& x) const = 0;
  virtual double density(const Vec3& x) const = 0;
  virtual Vec3 u_contra(const Vec3& x) const = 0;
  virtual double sqrt_g(const Vec3& x) const = 0;

  /// Inverse of the diagonal metric used to raise dPsi when building
  /// n = grad Psi / |grad Psi|^2.
  virtual Vec3 gradient_metric_inverse(const Vec3& x) const = 0;

  /// |f| in beta restricted to the phi = 0 section, beta_P = f dx ^ dy, in
  /// the section coordinates used by the grid method.
  virtual double flux_form_coefficient(const Vec3& x) const = 0;

  /// Map section coordinates (first, second) on phi = 0 to a chart point.
  virtual Vec3 from_section(double s1, double s2) const = 0;
  /// Inverse of from_section (phi is ignored).
  virtual std::array<double, 2> to_section(const Vec3& x) const = 0;

  /// Index of the toroidal angle phi in the chart.
  virtual int toroidal_index() const = 0;

  /// Unwrapped u-line phase measured from x0. A field line returns to the
  /// u-line through x0 when this reaches a multiple of 2 pi. `near` is a
  /// previous value of the phase used for angle unwrapping.
  virtual double uline_phase(const Vec3& x, const Vec3& x0, double near) const = 0;

  /// Coordinate that must match its initial value at a true u-line return.
  virtual double uline_match_coordinate(const Vec3& x) const = 0;

  /// Rough period of the u-line return for the given flow near the axis;
  /// sets the default time horizon of the tracer.
  virtual double axis_return_estimate(bool scaled_field) const = 0;

  /// Period of the closed u-lines.
  virtual double uline_period() const = 0;
  /// Exact flow of u for time s.
  virtual Vec3 u_flow(const Vec3& x, double s) const = 0;

  /// v = B / rho.
  Vec3 v_contra(const Vec3& x) const;
  /// n = grad Psi / |grad Psi|^2 in contravariant components.
  Vec3 normal_contra(const Vec3& x) const;
};

// ---------------------------------------------------------------------------

struct AxisymParams {
  double C = 1.0;   ///< toroidal field strength, > 0
  double r0 = 0.9;  ///< bound on the minor radius of the domain, in (0, 1)
};

/// Axisymmetric tokamak field in cylindrical coordinates (R, phi, z),
/// magnetic axis at R = 1, z = 0:
///   B = (-z/R, C/R^2, (R-1)/R),  Psi = ((R-1)^2 + z^2)/2,  u = d/dphi.
/// The section coordinates are (R, z).
class AxisymField final : public FieldModel {
 public:
  explicit AxisymField(AxisymParams params = {});

  const AxisymParams& params() const { return params_; }

  FieldKind kind() const override { return FieldKind::Axisymmetric; }
  Chart chart() const override { return Chart::Cylindrical; }
  std::string_view name() const override { return "axisym"; }

  Vec3 b_contra(const Vec3& x) const override;
  double psi_label(const Vec3& x) const override;
  Vec3 psi_gradient(const Vec3& x) const override;
  Vec3 a_cov(const Vec3& x) const override;
  double density(const Vec3&) const override { return 1.0; }
  Vec3 u_contra(const Vec3&) const override { return {0.0, 1.0, 0.0}; }
  double sqrt_g(const Vec3& x) const override { return x[0]; }
  Vec3 gradient_metric_inverse(const Vec3& x) const override;
  double flux_form_coefficient(const Vec3& x) const override;
  Vec3 from_section(double R, double z) const override { return {R, 0.0, z}; }
  std::array<double, 2> to_section(const Vec3& x) const override {
    return {x[0], x[2]};
  }
  int toroidal_index() const override { return 1; }
  double uline_phase(const Vec3& x, const Vec3& x0, double near) const override;
  double uline_match_coordinate(const Vec3& x) const override {
    return psi_label(x);
  }
  double axis_return_estimate(bool) const override { return kTwoPi; }
  double uline_period() const override { return kTwoPi; }
  Vec3 u_flow(const Vec3& x, double s) const override {
    return {x[0], x[1] + s, x[2]};
  }

  /// Exact enclosed volume 4 pi^2 Psi.
  static double exact_volume(double Psi);
  /// Poloidal angle about the magnetic axis, in (-pi, pi].
  static double poloidal_angle(const Vec3& x);

 private:
  AxisymParams params_;
};

// ---------------------------------------------------------------------------

/// Polynomial sum_k c_k psi^k.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double x) const;
  double derivative(double x) const;
};

struct HelicalParams {
  double w1 = 0.25;
  double w2 = 1.0;
  double B0 = 1.0;
  double R0 = 2.0;
  int m = 2;
  int n = 1;
  double eps = 0.007;
  double zeta = 0.0;
  Polynomial f{{-4.0, 1.0}};  ///< f(psi) = psi - R0^2/B0 for the defaults

  /// Parameter set used for all helical results: w1 = 1/4, w2 = 1, B0 = 1,
  /// R0 = 2, zeta = 0, f = psi - R0^2/B0, (m, n) = (2, 1), eps = 0.007.
  static HelicalParams standard(double eps = 0.007);
  void validate() const;
};

/// Circular tokamak field perturbed by one helical mode, in adapted toroidal
/// coordinates (psi, vtheta, phi):
///   A = (0, psi, -[w1 psi + w2 psi^2 + eps psi^{m/2} f(psi) cos(m vtheta - n phi + zeta)])
///   Psi = -n psi - m A_phi,  u = n d/dvtheta + m d/dphi,  rho = B^phi.
/// The section coordinates are the symplectic pair (ytil, ztil).
class HelicalField final : public FieldModel {
 public:
  explicit HelicalField(HelicalParams params = HelicalParams::standard());

  const HelicalParams& params() const { return params_; }
  coords::TorusGeometry geometry() const { return {params_.B0, params_.R0}; }

  FieldKind kind() const override { return FieldKind::Helical; }
  Chart chart() const override { return Chart::AdaptedToroidal; }
  std::string_view name() const override { return "helical"; }

  Vec3 b_contra(const Vec3& x) const override;
  double psi_label(const Vec3& x) const override;
  Vec3 psi_gradient(const Vec3& x) const override;
  Vec3 a_cov(const Vec3& x) const override;
  double density(const Vec3& x) const override;
  Vec3 u_contra(const Vec3&) const override;
  double sqrt_g(const Vec3& x) const override;
  Vec3 gradient_metric_inverse(const Vec3& x) const override;
  double flux_form_coefficient(const Vec3&) const override { return params_.B0; }
  Vec3 from_section(double ytil, double ztil) const override;
  std::array<double, 2> to_section(const Vec3& x) const override;
  int toroidal_index() const override { return 2; }
  double uline_phase(const Vec3& x, const Vec3& x0, double near) const override;
  double uline_match_coordinate(const Vec3& x) const override { return x[0]; }
  double axis_return_estimate(bool scaled_field) const override;
  double uline_period() const override;
  Vec3 u_flow(const Vec3& x, double s) const override;

  /// Cylindrical radius R(psi, vtheta).
  double major_radius(const Vec3& x) const;
  /// Label as a function of psi and the helical phase chi = m vtheta - n phi.
  double psi_label_at(double psi, double chi) const;
  /// Divergence of u with respect to the Euclidean volume,
  /// -2 n r sin(vtheta) / (R0 - r cos(vtheta)).
  double u_divergence(const Vec3& x) const;

 private:
  double perturbation_amplitude(double psi) const;   // psi^{m/2} f
  double perturbation_slope(double psi) const;       // d/dpsi of the above
  double helical_phase(const Vec3& x) const;

  HelicalParams params_;
};

std::unique_ptr<FieldModel> make_field(const std::string& kind,
                                       const AxisymParams& axisym,
                                       const HelicalParams& helical);

}  // namespace fluxvol
