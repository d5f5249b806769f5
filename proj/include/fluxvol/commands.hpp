#pragma once

// Subcommand bodies behind the fluxvol executable. They write artifacts and
// a short summary, and return the process exit status.

#include <iosfwd>
#include <string>

#include "fluxvol/config.hpp"
#include "fluxvol/parallel.hpp"
#include "fluxvol/tables.hpp"

namespace fluxvol {

enum ExitStatus : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNumerical = 2,  ///< only in strict mode
};

/// Profiles for every configured method, written to cfg.output (CSV) and
/// the metadata path (JSON). An output of "-" prints the CSV instead and
/// skips the metadata.
int cmd_volume(const RunConfig& cfg, std::ostream& out, std::ostream& err);

enum class TableChoice { Table1, Table2, Both };

int cmd_table(TableChoice which, const TableOptions& opts, const std::string& output,
              bool strict, std::ostream& out, std::ostream& err);

struct DiagnosticsOptions {
  int surfaces = 20;  ///< per region
  /// Use cfg.region and [cfg.psi1, cfg.psi2] instead of sweeping every
  /// region of the field.
  bool single_region = false;
};

/// Columns region, Psi, T, T_avg_{1,10,20,30}, inv_rho_hat_{4,5,6,7}, status.
int cmd_diagnostics(const RunConfig& cfg, const DiagnosticsOptions& opts, std::ostream& out,
                    std::ostream& err);

/// Invariant suite; exit status 2 when any check fails.
int cmd_check(const RunConfig& cfg, bool include_grid, std::ostream& out, std::ostream& err);

}  // namespace fluxvol
