#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace soaksim::cli {

// Exit-code contract shared by every subcommand:
//   0 success, 1 threshold exceeded, 2 input problem, 3 runtime failure.
// Failures also leave an `error.txt` record in the output directory when one
// is available.
inline constexpr int kExitOk = 0;
inline constexpr int kExitThreshold = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitRuntime = 3;

const char* version_string();

// Flag-level overrides applied on top of the loaded config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> dt_s;
  std::optional<double> weight_mol;
  std::optional<std::vector<double>> snapshot_times_s;
  std::optional<double> kb0_mps;
  std::optional<std::string> cap;  // number, `auto`, or `none`
};

struct SimulateArgs {
  std::string config_path;
  std::string out_dir;
  RunOverrides overrides;
  unsigned workers = 0;  // 0: one thread per hardware core
  std::string command_line;
};

// Runs the particle engine and writes config.txt, timeseries.csv,
// snapshot_NNN.csv / consumed_NNN.csv per snapshot time, the consumption
// ledger, and manifest.txt.
int cmd_simulate(const SimulateArgs& args);

struct OracleArgs {
  std::string config_path;
  std::string out_dir;
  RunOverrides overrides;
  std::uint32_t nr = 64;
  std::uint32_t nz = 256;
  double dt_pde_s = 0.0;  // 0: derive from the positivity bound
  bool auto_shrink = true;
  std::string command_line;
};

// Runs the deterministic reference solver and writes config.txt,
// solver_series.csv (with the per-step mass residual), field_NNN.csv per
// snapshot time, consumed_rings.csv, and manifest.txt.
int cmd_oracle(const OracleArgs& args);

struct FitArgs {
  std::vector<std::string> data_paths;  // one contact-area table per series
  double volume_m3 = 0.0;               // fallback when a table has no volume
  std::string out_path;                 // optional CSV report
};

// Estimates the soaking rate per series (least squares and two-point),
// printing one summary line each.
int cmd_fit(const FitArgs& args);

struct CompareArgs {
  std::string dir_a;            // particle run directory
  std::string dir_b;            // reference run (or second particle run)
  std::string thresholds_path;  // optional key = value file
  std::string out_dir;          // optional report directory
  double max_l1 = 0.05;
  double max_consumed_rel_err = 0.10;
};

// Cross-validates two finished runs through matched radial-profile
// reductions; exit 1 when either error exceeds its threshold.
int cmd_compare(const CompareArgs& args);

}  // namespace soaksim::cli
