#pragma once

// Volume between flux surfaces: the direct grid sum, the contour integral,
// and the return-time formulas, plus the Psi quadrature that turns dV/dPsi
// samples into V(Psi).

#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fluxvol/fields.hpp"
#include "fluxvol/surfaces.hpp"
#include "fluxvol/tracer.hpp"

namespace fluxvol {

enum class Method { Grid, Contour, Thm1, Thm3p, Thm4 };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// -- grid sum -----------------------------------------------------------------

enum class NodePlacement {
  CellCentred,  ///< node at the centre of each of the N1 x N2 cells
  Endpoints,    ///< N points per axis including both rectangle edges
};

struct GridSpec {
  double x0 = 0.0;
  double y0 = 0.0;
  double L1 = 1.0;  ///< half-extent along the first section coordinate
  double L2 = 1.0;
  int N1 = 100;
  int N2 = 100;
  NodePlacement placement = NodePlacement::CellCentred;

  void validate() const;
  double node_x(int i) const;
  double node_y(int j) const;
  double cell_area() const { return 4.0 * L1 * L2 / (double(N1) * N2); }
};

struct GridResult {
  double volume = 0.0;
  std::size_t members = 0;   ///< nodes inside the Psi band and the mask
  std::size_t failures = 0;  ///< members whose transit could not be traced
  bool empty() const { return members == 0; }
};

using PointMask = std::function<bool(const Vec3& x)>;

/// Sum of T |f| cell_area over grid nodes with Psi0 < Psi < Psi1 (and the
/// optional mask), T the toroidal transit time from the node.
GridResult volume_grid(const FieldModel& field, double Psi0, double Psi1,
                       const GridSpec& grid, const PointMask& mask = {},
                       const TracerOptions& opts = {});

// -- per-surface dV/dPsi --------------------------------------------------------

/// Sum over contour nodes of T(nu_j) i_{eps_j} lambda, with
/// i_eps lambda = sqrt(g) det[n, B, eps] and eps_j the centred half
/// difference of neighbouring nodes. Island contours sum over all loops.
double dVdPsi_contour(const FieldModel& field, const LevelSetContour& contour,
                      const TracerOptions& opts = {});

/// 2 pi T with T the poloidal return time along B from x0.
double dVdPsi_thm1(const AxisymField& field, const Vec3& x0,
                   const TracerOptions& opts = {});

struct Thm3pSample {
  double dVdPsi = 0.0;
  double T = 0.0;            ///< return time along B/rho
  double inv_rho_mean = 1.0;
  double Delta = 0.0;
};

/// Delta / rho_hat. With unit_density the density is taken as 1 and the flow
/// is B itself, which is valid when u preserves volume.
Thm3pSample dVdPsi_thm3p(const FieldModel& field, const Vec3& x0, int q,
                         bool unit_density = false, const TracerOptions& opts = {},
                         const UlineOptions& uopts = {});

/// 2 pi Tbar with Tbar the mean of the first n_avg valid u-line returns
/// along B.
double dVdPsi_thm4(const FieldModel& field, const Vec3& x0, int n_avg,
                   const TracerOptions& opts = {});

/// Periodic trapezoid quadrature of the potential along the u-line through x0.
double phi_flux(const FieldModel& field, const Vec3& x0, int n_nodes = 64);

// -- ladders and profiles ---------------------------------------------------------

/// How a ladder endpoint at a singular surface (separatrix or region
/// centre) gets its dV/dPsi value.
enum class EndpointPolicy {
  /// Sample at the clipped point and model the end panel: linear
  /// extrapolation at a region centre, where dV/dPsi stays finite, and
  /// a + b log|Psi - Psi_sep| at the separatrix, integrated exactly.
  Extrapolate,
  Direct,  ///< use the value sampled at the clipped point as is
};

struct PsiLadder {
  Region region = Region::Inner;
  /// Uniform nodes, ordered outward from the region's reference surface.
  std::vector<double> values;
  /// Where dV/dPsi is sampled for each node.
  std::vector<double> sample_at;
  /// Node value is extrapolated from its neighbour rather than sampled.
  std::vector<bool> extrapolated;
  /// Endpoint on the separatrix whose panel gets the logarithmic model.
  std::vector<bool> log_panel;
  double separatrix_clip = 0.0;
  EndpointPolicy policy = EndpointPolicy::Extrapolate;
};

struct SingularSurfaces {
  double centre = 0.0;  ///< axis or O-point value
  double separatrix = std::numeric_limits<double>::quiet_NaN();
};

/// Ladder of n intervals over [min(a,b), max(a,b)] in `region`. Endpoints
/// within the clip distance of a singular surface are sampled just inside.
/// clip <= 0 selects max(1e-4 |b - a|, 1e-6).
PsiLadder make_ladder(double a, double b, int n, Region region,
                      const SingularSurfaces& singular, double clip = 0.0,
                      EndpointPolicy policy = EndpointPolicy::Extrapolate);

struct ProfileRow {
  double Psi = 0.0;
  double dVdPsi = 0.0;
  double V_cum = 0.0;
};

struct VolumeProfile {
  Method method = Method::Thm3p;
  Region region = Region::Inner;
  std::vector<ProfileRow> rows;
  std::map<std::string, std::string> provenance;

  double total() const { return rows.empty() ? 0.0 : rows.back().V_cum; }
};

/// Cumulative trapezoid of |samples| along the ladder, where samples[k] is
/// dV/dPsi at ladder.sample_at[k]. Extrapolated nodes are filled from the
/// sampled neighbours first.
VolumeProfile integrate_profile(const PsiLadder& ladder, std::vector<double> samples);

/// Inputs shared by the per-surface methods.
struct MethodOptions {
  int n_contour = 100;  ///< N_g
  int q = 6;
  int n_avg = 10;
  bool unit_density = false;
  TracerOptions tracer;
  UlineOptions uline;
};

/// dV/dPsi for one surface of `region`. `crit` is required for the helical
/// field and ignored otherwise.
double dVdPsi_at(const FieldModel& field, const CriticalSet* crit, Method method,
                 Region region, double Psi, const MethodOptions& opts);

/// Profile of `method` over [Psi_a, Psi_b] with an n-interval ladder.
VolumeProfile compute_profile(const FieldModel& field, const CriticalSet* crit,
                              Method method, Region region, double Psi_a,
                              double Psi_b, int n, const MethodOptions& opts,
                              double clip = 0.0,
                              EndpointPolicy policy = EndpointPolicy::Extrapolate);

}  // namespace fluxvol
