#pragma once

// Geometry of the flux foliation on the phi = 0 section: critical points of
// Psi, regions, level-set contours, lattice generators and the harmonic
// average of the density.

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxvol/fields.hpp"
#include "fluxvol/tracer.hpp"

namespace fluxvol {

enum class Region { Inner, Island, Outer };

std::string_view to_string(Region r);
Region region_from_string(std::string_view s);

struct CriticalPoint {
  double ytil = 0.0;
  double ztil = 0.0;
  double Psi = 0.0;
};

struct CriticalSet {
  std::vector<CriticalPoint> o_points;  ///< island centres, sorted by angle
  std::vector<CriticalPoint> x_points;
  double psi_axis = 0.0;
  /// Lowest O-point value; NaN without an island.
  double psi_o = std::numeric_limits<double>::quiet_NaN();
  /// Separatrix value. Without an island this is the minimum of Psi along
  /// the vtheta = 0 ray, which still splits inner from outer surfaces.
  double psi_sep = std::numeric_limits<double>::quiet_NaN();

  bool has_island() const { return !o_points.empty(); }
};

struct CriticalSearchOptions {
  double extent = 0.9;    ///< seeds cover |ytil|, |ztil| <= extent
  int seeds_per_axis = 25;
  double dedupe = 1e-8;
};

/// Newton iteration on grad Psi = 0 in (ytil, ztil) from a seed grid, with
/// Hessian classification. Degenerate points (e.g. the critical circle of
/// the unperturbed field) are dropped.
CriticalSet find_critical_points(const HelicalField& field,
                                 const CriticalSearchOptions& opts = {});

/// Open interval of Psi values of a region; +inf bounds the outer region.
struct PsiInterval {
  double lo;
  double hi;
};
PsiInterval region_interval(const CriticalSet& crit, Region region);

/// Moves Psi onto the nearest edge of the region interval when it lies
/// outside by at most `tol`; returns whether it moved. Lets rounded anchor
/// values such as -0.0384 stand for the O-point.
bool snap_to_region(const CriticalSet& crit, Region region, double& Psi, double tol);

struct Classification {
  Region region = Region::Inner;
  bool boundary = false;  ///< within 1e-9 of the separatrix value
};

Classification classify(const HelicalField& field, const CriticalSet& crit,
                        const Vec3& x);

/// psi at which Psi is minimal along the ray of helical phase through x.
double ray_minimum_psi(const HelicalField& field, double vtheta, double phi);

struct LevelSetContour {
  Region region = Region::Inner;
  double Psi0 = 0.0;
  /// One closed loop per component, nodes as chart points on phi = 0,
  /// ordered by polar angle about the loop centre.
  std::vector<std::vector<Vec3>> loops;
  /// Some ray met the level set more than once.
  bool multiple_roots = false;

  int components() const { return static_cast<int>(loops.size()); }
};

/// Circle of radius sqrt(2 Psi0) about the axis.
LevelSetContour extract_contour(const AxisymField& field, double Psi0, int n_nodes);

/// Ray casting from the region centre: the origin for inner and outer
/// surfaces, each O-point for the island (in the plane of scaled
/// (vtheta, psi) offsets).
LevelSetContour extract_contour(const HelicalField& field, const CriticalSet& crit,
                                double Psi0, Region region, int n_nodes);

/// Point on the surface Psi0 of `region`, on the outboard midplane
/// (vtheta = 0, or the first O-point angle for the island).
Vec3 surface_seed(const HelicalField& field, const CriticalSet& crit, double Psi0,
                  Region region);
Vec3 surface_seed(const AxisymField& field, double Psi0);

struct LatticeGenerators {
  std::array<double, 2> T1{};  ///< (u-time, v-time)
  std::array<double, 2> T2{};
  double Delta = 0.0;
  /// c in T2 = (-c, T) is never computed and is stored as 0.
  bool c_known = false;
};

LatticeGenerators lattice_generators(const FieldModel& field, const Vec3& x0,
                                     const TracerOptions& opts = {},
                                     const UlineOptions& uopts = {});

struct HarmonicAverage {
  double inv_rho_mean = 0.0;  ///< <1/rho> over the q x q lattice
  double rho_hat = 0.0;
};

HarmonicAverage harmonic_average_rho(const FieldModel& field, const Vec3& x0,
                                     const LatticeGenerators& gen, int q,
                                     const TracerOptions& opts = {});

}  // namespace fluxvol
