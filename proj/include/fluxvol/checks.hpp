#pragma once

// Invariant suite run by `fluxvol check`: conservation, divergence and
// commutator identities, u-line start invariance, chart round trips, the
// flux identity along u-lines, harmonic-average convergence and the
// convergence rate of the grid sum.

#include <cstdint>
#include <string>
#include <vector>

#include "fluxvol/volume.hpp"

namespace fluxvol {

struct CheckResult {
  std::string name;
  double value = 0.0;      ///< worst observed quantity
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t seed = 1;
  bool include_grid = true;  ///< the grid fit takes several seconds
  TracerOptions tracer;
};

CheckResult check_psi_conservation(std::uint64_t seed, const TracerOptions& opts = {});
CheckResult check_divergence(std::uint64_t seed);
CheckResult check_commutator(std::uint64_t seed);
CheckResult check_uline_start(std::uint64_t seed, const TracerOptions& opts = {});
CheckResult check_chart_round_trips(std::uint64_t seed);
CheckResult check_phi_identity(std::uint64_t seed, int lines = 20);
/// |<1/rho>_6 - <1/rho>_7| / <1/rho>_7 over `per_region` surfaces in each
/// helical region.
CheckResult check_harmonic_convergence(int per_region = 10, const TracerOptions& opts = {});

struct GridConvergence {
  std::vector<int> sizes;          ///< N, with N1 = N2 = N
  std::vector<double> mean_error;  ///< mean relative error over the Psi set
  double exponent = 0.0;           ///< -slope of log error against log(N1 N2)
};

/// Grid sum on the axisymmetric field against the exact volume for
/// Psi in {0.02, 0.035, 0.05, 0.065, 0.08} and N in `sizes`.
GridConvergence grid_convergence(NodePlacement placement,
                                 const std::vector<int>& sizes = {25, 50, 100, 200, 400},
                                 const TracerOptions& opts = {});
CheckResult check_grid_convergence(const TracerOptions& opts = {});

std::vector<CheckResult> run_property_checks(const CheckOptions& opts = {});

}  // namespace fluxvol
