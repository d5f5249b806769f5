// Command-line front end: volume, table, diagnostics and check.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fluxvol/commands.hpp"
#include "fluxvol/report.hpp"

using namespace fluxvol;

namespace {

// Options shared by the subcommands that read a run configuration. Values
// are kept as strings and replayed as `key=value` overrides after the
// config file and any --set, so explicit flags always win.
struct RunFlags {
  std::string config;
  std::vector<std::string> sets;
  std::vector<std::pair<std::string, std::string>> flags;
  std::optional<std::string> psi;
  bool strict = false;

  void add(CLI::App* app, const std::string& name, const std::string& key,
           const std::string& help) {
    app->add_option_function<std::string>(
        "--" + name, [this, key](const std::string& v) { flags.emplace_back(key, v); }, help);
  }

  void attach(CLI::App* app) {
    app->add_option("--config,-c", config, "key = value configuration file");
    app->add_option("--set,-s", sets, "override, key=value (repeatable)");
    add(app, "field", "field", "axisym or helical");
    add(app, "method", "method", "grid, contour, thm1, thm3p, thm4 (comma list)");
    add(app, "region", "region", "inner, island or outer");
    app->add_option("--psi", psi, "shorthand for --psi1 0 --psi2 VALUE");
    add(app, "psi1", "psi1", "first bounding surface");
    add(app, "psi2", "psi2", "second bounding surface");
    add(app, "n", "n", "intervals of the Psi ladder");
    add(app, "output,-o", "output", "CSV path, - for stdout");
    add(app, "metadata", "metadata", "JSON sidecar path");
    add(app, "threads,-j", "threads", "worker threads, 0 = all cores");
    add(app, "seed", "seed", "seed of the sampled checks");
    add(app, "grid-nodes", "grid.nodes", "centred or endpoints");
    add(app, "endpoint", "endpoint", "extrapolate or direct");
    app->add_flag("--strict", strict, "exit with status 2 on numerical failures");
  }

  bool given(const std::string& key) const {
    for (const auto& [k, v] : flags)
      if (k == key) return true;
    return false;
  }

  RunConfig build() const {
    RunConfig cfg = config.empty() ? RunConfig{} : load_config(config);
    for (const auto& s : sets) apply_override(cfg, s);
    if (psi) {
      apply_override(cfg, "psi1=0");
      apply_override(cfg, "psi2=" + *psi);
    }
    for (const auto& [k, v] : flags) apply_override(cfg, k + "=" + v);
    if (strict) cfg.strict = true;
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumes between flux surfaces of integrable magnetic fields"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  RunFlags vol_flags;
  auto* vol = app.add_subcommand("volume", "volume profile between two flux surfaces");
  vol_flags.attach(vol);
  bool add_enclosed = false;
  vol->add_flag("--add-enclosed", add_enclosed, "outer totals include inner and island volumes");

  auto* table = app.add_subcommand("table", "reproduce the comparison tables");
  std::string which = "all";
  std::string table_out = "-";
  std::string table_nodes = "centred";
  std::string table_endpoint = "extrapolate";
  bool table_no_grid = false;
  bool table_strict = false;
  unsigned table_threads = 0;
  table->add_option("which", which, "table1, table2 or all")
      ->check(CLI::IsMember({"table1", "table2", "all"}));
  table->add_option("--output,-o", table_out, "CSV path, - for stdout");
  table->add_option("--grid-nodes", table_nodes, "centred or endpoints")
      ->check(CLI::IsMember({"centred", "endpoints"}));
  table->add_option("--endpoint", table_endpoint, "extrapolate or direct")
      ->check(CLI::IsMember({"extrapolate", "direct"}));
  table->add_flag("--no-grid", table_no_grid, "skip the grid-sum cells");
  table->add_flag("--strict", table_strict, "exit with status 2 when a cell is out of band");
  table->add_option("--threads,-j", table_threads, "worker threads, 0 = all cores");

  RunFlags diag_flags;
  auto* diag = app.add_subcommand("diagnostics", "return times and harmonic averages against Psi");
  diag_flags.attach(diag);
  DiagnosticsOptions diag_opts;
  diag->add_option("--surfaces", diag_opts.surfaces, "surfaces per region");

  RunFlags check_flags;
  auto* check = app.add_subcommand("check", "run the invariant suite");
  check_flags.attach(check);
  bool check_no_grid = false;
  check->add_flag("--no-grid", check_no_grid, "skip the grid convergence fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*vol) {
      RunConfig cfg = vol_flags.build();
      if (add_enclosed) cfg.add_enclosed = true;
      return cmd_volume(cfg, std::cout, std::cerr);
    }
    if (*table) {
      TableOptions opts;
      opts.grid_nodes =
          table_nodes == "endpoints" ? NodePlacement::Endpoints : NodePlacement::CellCentred;
      opts.endpoint =
          table_endpoint == "direct" ? EndpointPolicy::Direct : EndpointPolicy::Extrapolate;
      opts.include_grid = !table_no_grid;
      set_thread_count(table_threads);
      const TableChoice choice = which == "table1"   ? TableChoice::Table1
                                 : which == "table2" ? TableChoice::Table2
                                                     : TableChoice::Both;
      return cmd_table(choice, opts, table_out, table_strict, std::cout, std::cerr);
    }
    if (*diag) {
      diag_opts.single_region = diag_flags.given("region") || diag_flags.given("psi1") ||
                                diag_flags.given("psi2") || diag_flags.psi.has_value();
      RunConfig cfg = diag_flags.build();
      if (!diag_flags.given("output") && cfg.output == RunConfig{}.output)
        cfg.output = "diagnostics.csv";
      return cmd_diagnostics(cfg, diag_opts, std::cout, std::cerr);
    }
    if (*check) return cmd_check(check_flags.build(), !check_no_grid, std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
