#include "fluxvol/fields.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fluxvol {

Vec3 FieldModel::v_contra(const Vec3& x) const {
  const Vec3 b = b_contra(x);
  const double rho = density(x);
  return {b[0] / rho, b[1] / rho, b[2] / rho};
}

Vec3 FieldModel::normal_contra(const Vec3& x) const {
  const Vec3 dpsi = psi_gradient(x);
  const Vec3 ginv = gradient_metric_inverse(x);
  double norm2 = 0.0;
  Vec3 grad{};
  for (int i = 0; i < 3; ++i) {
    grad[i] = ginv[i] * dpsi[i];
    norm2 += grad[i] * dpsi[i];
  }
  for (double& g : grad) g /= norm2;
  return grad;
}

// -- axisymmetric -------------------------------------------------------------

AxisymField::AxisymField(AxisymParams params) : params_(params) {
  if (!(params_.C > 0.0)) throw std::invalid_argument("axisym: C must be > 0");
  if (!(params_.r0 > 0.0 && params_.r0 < 1.0)) {
    throw std::invalid_argument("axisym: r0 must lie in (0, 1)");
  }
}

Vec3 AxisymField::b_contra(const Vec3& x) const {
  const double R = x[0];
  const double z = x[2];
  return {-z / R, params_.C / (R * R), (R - 1.0) / R};
}

double AxisymField::psi_label(const Vec3& x) const {
  const double r = x[0] - 1.0;
  return 0.5 * (r * r + x[2] * x[2]);
}

Vec3 AxisymField::psi_gradient(const Vec3& x) const {
  return {x[0] - 1.0, 0.0, x[2]};
}

Vec3 AxisymField::a_cov(const Vec3& x) const {
  // curl A = B with A_R = C z / R, A_phi = Psi, A_z = 0.
  return {params_.C * x[2] / x[0], psi_label(x), 0.0};
}

Vec3 AxisymField::gradient_metric_inverse(const Vec3& x) const {
  return {1.0, 1.0 / (x[0] * x[0]), 1.0};
}

double AxisymField::flux_form_coefficient(const Vec3& x) const {
  return params_.C / x[0];
}

double AxisymField::poloidal_angle(const Vec3& x) {
  return std::atan2(x[2], x[0] - 1.0);
}

double AxisymField::uline_phase(const Vec3& x, const Vec3& x0, double near) const {
  const double raw = poloidal_angle(x) - poloidal_angle(x0);
  return near + coords::wrap_angle(raw - near);
}

double AxisymField::exact_volume(double Psi) { return 4.0 * kPi * kPi * Psi; }

// -- helical ------------------------------------------------------------------

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double Polynomial::derivative(double x) const {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    acc = acc * x + static_cast<double>(k) * coeffs[k];
  }
  return acc;
}

HelicalParams HelicalParams::standard(double eps) {
  HelicalParams p;
  p.eps = eps;
  p.f = Polynomial{{-p.R0 * p.R0 / p.B0, 1.0}};
  return p;
}

void HelicalParams::validate() const {
  if (m < 2) throw std::invalid_argument("helical: m must be >= 2");
  if (w2 == 0.0) throw std::invalid_argument("helical: w2 must be nonzero");
  if (!(B0 > 0.0)) throw std::invalid_argument("helical: B0 must be > 0");
  if (!(R0 > 0.0)) throw std::invalid_argument("helical: R0 must be > 0");
  if (f.coeffs.empty()) throw std::invalid_argument("helical: f has no coefficients");
}

HelicalField::HelicalField(HelicalParams params) : params_(std::move(params)) {
  params_.validate();
}

double HelicalField::major_radius(const Vec3& x) const {
  return coords::R_of_adapted(coords::PointTorAdapted::from_vec(x), geometry());
}

double HelicalField::helical_phase(const Vec3& x) const {
  return params_.m * x[1] - params_.n * x[2] + params_.zeta;
}

double HelicalField::perturbation_amplitude(double psi) const {
  return std::pow(psi, 0.5 * params_.m) * params_.f(psi);
}

double HelicalField::perturbation_slope(double psi) const {
  // psi^{m/2 - 1} [ (m/2) f + psi f' ]
  const double half_m = 0.5 * params_.m;
  return std::pow(psi, half_m - 1.0) *
         (half_m * params_.f(psi) + psi * params_.f.derivative(psi));
}

Vec3 HelicalField::b_contra(const Vec3& x) const {
  const double R = major_radius(x);
  const double scale = params_.B0 * params_.R0 / (R * R);
  const double psi = x[0];
  const double chi = helical_phase(x);
  const double b_psi =
      params_.m * params_.eps * perturbation_amplitude(psi) * std::sin(chi);
  const double b_vtheta = params_.w1 + 2.0 * params_.w2 * psi +
                          params_.eps * perturbation_slope(psi) * std::cos(chi);
  return {scale * b_psi, scale * b_vtheta, scale};
}

Vec3 HelicalField::a_cov(const Vec3& x) const {
  const double psi = x[0];
  const double a_phi = -(params_.w1 * psi + params_.w2 * psi * psi +
                         params_.eps * perturbation_amplitude(psi) *
                             std::cos(helical_phase(x)));
  return {0.0, psi, a_phi};
}

double HelicalField::psi_label_at(double psi, double chi) const {
  const double a_phi = -(params_.w1 * psi + params_.w2 * psi * psi +
                         params_.eps * perturbation_amplitude(psi) * std::cos(chi));
  return -params_.n * psi - params_.m * a_phi;
}

double HelicalField::psi_label(const Vec3& x) const {
  return psi_label_at(x[0], helical_phase(x));
}

Vec3 HelicalField::psi_gradient(const Vec3& x) const {
  const double psi = x[0];
  const double chi = helical_phase(x);
  const int m = params_.m;
  const int n = params_.n;
  const double da_dpsi = -(params_.w1 + 2.0 * params_.w2 * psi +
                           params_.eps * perturbation_slope(psi) * std::cos(chi));
  const double amp = params_.eps * perturbation_amplitude(psi);
  const double da_dvtheta = amp * m * std::sin(chi);
  const double da_dphi = -amp * n * std::sin(chi);
  return {-n - m * da_dpsi, -m * da_dvtheta, -m * da_dphi};
}

double HelicalField::density(const Vec3& x) const {
  const double R = major_radius(x);
  return params_.B0 * params_.R0 / (R * R);
}

Vec3 HelicalField::u_contra(const Vec3&) const {
  return {0.0, static_cast<double>(params_.n), static_cast<double>(params_.m)};
}

double HelicalField::sqrt_g(const Vec3& x) const {
  return coords::adapted_volume_factor(coords::PointTorAdapted::from_vec(x),
                                       geometry());
}

Vec3 HelicalField::gradient_metric_inverse(const Vec3& x) const {
  const double psi = x[0];
  return {2.0 * params_.B0 * psi, params_.B0 / (2.0 * psi),
          1.0 / (params_.R0 * params_.R0)};
}

Vec3 HelicalField::from_section(double ytil, double ztil) const {
  const auto a = coords::adapted_of_symplectic({ytil, ztil}, params_.B0, 0.0);
  return a.point.as_vec();
}

std::array<double, 2> HelicalField::to_section(const Vec3& x) const {
  const auto s = coords::symplectic_of_adapted(coords::PointTorAdapted::from_vec(x),
                                               params_.B0);
  return {s.ytil, s.ztil};
}

double HelicalField::uline_phase(const Vec3& x, const Vec3& x0, double) const {
  return params_.m * (x[1] - x0[1]) - params_.n * (x[2] - x0[2]);
}

double HelicalField::axis_return_estimate(bool scaled_field) const {
  const double rate = std::abs(params_.m * params_.w1 - params_.n);
  const double period_v = rate > 0.0 ? kTwoPi / rate : kTwoPi;
  // Along B the flow is slower by 1/rho = R0/B0 on the axis.
  return scaled_field ? period_v : period_v * params_.R0 / params_.B0;
}

double HelicalField::uline_period() const {
  const int g = std::gcd(std::abs(params_.m), std::abs(params_.n));
  return kTwoPi / g;
}

Vec3 HelicalField::u_flow(const Vec3& x, double s) const {
  return {x[0], x[1] + params_.n * s, x[2] + params_.m * s};
}

double HelicalField::u_divergence(const Vec3& x) const {
  const double r = coords::r_of_psi(x[0], params_.B0, params_.R0);
  const double vt = x[1];
  return -2.0 * params_.n * r * std::sin(vt) / (params_.R0 - r * std::cos(vt));
}

std::unique_ptr<FieldModel> make_field(const std::string& kind,
                                       const AxisymParams& axisym,
                                       const HelicalParams& helical) {
  if (kind == "axisym") return std::make_unique<AxisymField>(axisym);
  if (kind == "helical") return std::make_unique<HelicalField>(helical);
  throw std::invalid_argument("unknown field model '" + kind + "'");
}

}  // namespace fluxvol
