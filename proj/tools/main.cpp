#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "table_io.hpp"

namespace {

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += argv[i];
  }
  return out;
}

// Shared --seed/--dt/--particles-weight/--snapshot-times/--kb0/--cap flags
// for the two run commands; only flags the user passed override the config.
struct OverrideFlags {
  std::uint64_t seed = 0;
  double dt = 0.0;
  double weight = 0.0;
  double kb0 = 0.0;
  std::string cap;
  std::vector<double> snaps;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_dt = nullptr;
  CLI::Option* o_weight = nullptr;
  CLI::Option* o_kb0 = nullptr;
  CLI::Option* o_cap = nullptr;
  CLI::Option* o_snaps = nullptr;

  void attach(CLI::App* cmd) {
    o_seed = cmd->add_option("--seed", seed, "Override the RNG seed");
    o_dt = cmd->add_option("--dt", dt, "Override the engine time step (s)");
    o_weight = cmd->add_option("--particles-weight", weight,
                               "Override the per-particle weight (mol)");
    o_snaps = cmd->add_option("--snapshot-times", snaps,
                              "Override the snapshot times (s, comma separated)")
                  ->delimiter(',');
    o_kb0 = cmd->add_option(
        "--kb0", kb0,
        "Initial surface consumption rate (m/s); required unless the config "
        "sets growth_initial_rate_mps");
    o_cap = cmd->add_option("--cap", cap,
                            "Consumption-rate cap: m/s value, 'auto', or 'none'");
  }

  soaksim::cli::RunOverrides collect() const {
    soaksim::cli::RunOverrides ov;
    if (*o_seed) ov.seed = seed;
    if (*o_dt) ov.dt_s = dt;
    if (*o_weight) ov.weight_mol = weight;
    if (*o_snaps) ov.snapshot_times_s = snaps;
    if (*o_kb0) ov.kb0_mps = kb0;
    if (*o_cap) ov.cap = cap;
    return ov;
  }
};

bool parse_grid(const std::string& text, std::uint32_t& nr, std::uint32_t& nz) {
  const std::size_t x = text.find('x');
  if (x == std::string::npos) return false;
  try {
    nr = static_cast<std::uint32_t>(
        soaksim::cli::parse_u64(text.substr(0, x)));
    nz = static_cast<std::uint32_t>(
        soaksim::cli::parse_u64(text.substr(x + 1)));
  } catch (const std::invalid_argument&) {
    return false;
  }
  return nr > 0 && nz > 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Droplet-on-agar toolkit: stochastic particle runs, a deterministic "
      "reference solver, soaking-rate calibration, and run comparison"};
  app.require_subcommand(1);
  app.set_version_flag("--version", soaksim::cli::version_string());

  const std::string command_line = join_args(argc, argv);

  soaksim::cli::SimulateArgs sim_args;
  OverrideFlags sim_flags;
  CLI::App* sim = app.add_subcommand(
      "simulate", "Run the stochastic particle engine and write its outputs");
  sim->add_option("--config", sim_args.config_path,
                  "Config file (a run manifest also works)")
      ->required();
  sim->add_option("--out", sim_args.out_dir, "Output directory")->required();
  sim_flags.attach(sim);
  sim->add_option("--workers", sim_args.workers,
                  "Worker threads (0 = one per hardware core)");

  soaksim::cli::OracleArgs ora_args;
  OverrideFlags ora_flags;
  std::string grid_text = "64x256";
  CLI::App* ora = app.add_subcommand(
      "oracle", "Run the deterministic reference solver on the same config");
  ora->add_option("--config", ora_args.config_path,
                  "Config file (a run manifest also works)")
      ->required();
  ora->add_option("--out", ora_args.out_dir, "Output directory")->required();
  ora_flags.attach(ora);
  ora->add_option("--grid", grid_text, "Solver cells as NRxNZ (default 64x256)");
  ora->add_option("--dt-pde", ora_args.dt_pde_s,
                  "Solver time step (s); 0 derives it from the positivity "
                  "bound");
  ora->add_flag_callback(
      "--no-auto-shrink",
      [&ora_args] { ora_args.auto_shrink = false; },
      "Fail instead of shrinking an unstable solver time step");

  soaksim::cli::FitArgs fit_args;
  CLI::App* fit = app.add_subcommand(
      "fit", "Estimate droplet soaking rates from contact-area tables");
  fit->add_option("files", fit_args.data_paths,
                  "Contact-area CSV tables (time_s,area_m2)")
      ->required();
  fit->add_option("--volume", fit_args.volume_m3,
                  "Droplet volume (m^3) for tables without a volume line");
  fit->add_option("--out", fit_args.out_path, "Write the fit report CSV here");

  soaksim::cli::CompareArgs cmp_args;
  CLI::App* cmp = app.add_subcommand(
      "compare", "Cross-validate two finished runs via radial profiles");
  cmp->add_option("particle_dir", cmp_args.dir_a,
                  "Particle run output directory")
      ->required();
  cmp->add_option("reference_dir", cmp_args.dir_b,
                  "Reference run directory (a second particle run also works)")
      ->required();
  cmp->add_option("--thresholds", cmp_args.thresholds_path,
                  "Threshold file with max_l1 / max_consumed_rel_err lines");
  cmp->add_option("--out", cmp_args.out_dir, "Report output directory");
  cmp->add_option("--max-l1", cmp_args.max_l1,
                  "Profile error limit (default 0.05)");
  cmp->add_option("--max-consumed-rel-err", cmp_args.max_consumed_rel_err,
                  "Consumed-mass relative error limit (default 0.10)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? soaksim::cli::kExitOk : soaksim::cli::kExitInput;
  }

  if (sim->parsed()) {
    sim_args.overrides = sim_flags.collect();
    sim_args.command_line = command_line;
    return soaksim::cli::cmd_simulate(sim_args);
  }
  if (ora->parsed()) {
    if (!parse_grid(grid_text, ora_args.nr, ora_args.nz)) {
      std::cerr << "error: --grid must look like 64x32\n";
      return soaksim::cli::kExitInput;
    }
    ora_args.overrides = ora_flags.collect();
    ora_args.command_line = command_line;
    return soaksim::cli::cmd_oracle(ora_args);
  }
  if (fit->parsed()) return soaksim::cli::cmd_fit(fit_args);
  if (cmp->parsed()) return soaksim::cli::cmd_compare(cmp_args);
  return soaksim::cli::kExitInput;  // unreachable: a subcommand is required
}
