#pragma once

// Reproduction of the two comparison tables: the axisymmetric volumes
// inside Psi = 0.02 ... 0.32 and the six helical Psi intervals.

#include <iosfwd>
#include <string>
#include <vector>

#include "fluxvol/surfaces.hpp"
#include "fluxvol/volume.hpp"

namespace fluxvol {

struct TableCell {
  std::string table;
  std::string interval;  ///< row label
  Region region = Region::Inner;
  double psi1 = 0.0;
  double psi2 = 0.0;
  Method method = Method::Grid;
  int N1 = 0;
  int N2 = 0;  ///< 0 when the method has no second size
  double value = 0.0;
  double reference = 0.0;  ///< exact volume or V*
  double rel_err = 0.0;    ///< |value / reference - 1|
  double tolerance = 0.0;  ///< band on rel_err
  double published_value = 0.0;
  double published_rel_dev = 0.0;  ///< |value / published_value - 1|
  double published_tolerance = 0.0;  ///< band on published_rel_dev, 0 = not asserted
  double runtime_s = 0.0;  ///< informational
  bool ok = false;
  std::string note;
};

struct TableOptions {
  NodePlacement grid_nodes = NodePlacement::CellCentred;
  EndpointPolicy endpoint = EndpointPolicy::Extrapolate;
  TracerOptions tracer;
  bool include_grid = true;
  int reference_n = 400;  ///< ladder size of V*
};

/// Six helical intervals, each bounded by the surfaces through (ytil, 0).
struct Table2Interval {
  std::string label;
  double ytil1;
  double ytil2;
  Region region;
  int grid_n;
  int n_contour;
  double published_grid;
  double published_contour;
  double published_thm3p;
  double published_thm4;
};

const std::vector<Table2Interval>& table2_intervals();

/// Psi bounds of an interval. The island lower bound is clamped to the
/// O-point value and the outer lower bound to the outer side of the
/// separatrix.
std::pair<double, double> table2_bounds(const HelicalField& field, const CriticalSet& crit,
                                        const Table2Interval& iv);

std::vector<TableCell> run_table1(const TableOptions& opts = {});
std::vector<TableCell> run_table2(const TableOptions& opts = {});

void write_table_csv(std::ostream& out, const std::vector<TableCell>& cells);

}  // namespace fluxvol
