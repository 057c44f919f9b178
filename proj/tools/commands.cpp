#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "config_text.hpp"
#include "manifest.hpp"
#include "soaksim/calibration.hpp"
#include "soaksim/continuum.hpp"
#include "soaksim/model.hpp"
#include "soaksim/particles.hpp"
#include "table_io.hpp"

namespace soaksim::cli {

namespace fs = std::filesystem;

const char* version_string() {
#ifdef SOAKSIM_VERSION
  return SOAKSIM_VERSION;
#else
  return "0.0.0";
#endif
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_error_record(const std::string& out_dir, int code, const char* kind,
                        const std::string& message) {
  if (out_dir.empty()) return;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return;
  std::ofstream f(fs::path(out_dir) / "error.txt",
                  std::ios::binary | std::ios::trunc);
  if (!f) return;
  std::string one_line = message;
  std::replace(one_line.begin(), one_line.end(), '\n', ' ');
  f << "soaksim_error 1\n"
    << "exit_code " << code << '\n'
    << "kind " << kind << '\n'
    << "message " << one_line << '\n';
}

int fail(const std::string& out_dir, int code, const char* kind,
         const std::string& message) {
  std::cerr << "error: " << message << '\n';
  write_error_record(out_dir, code, kind, message);
  return code;
}

class OutputWriter {
 public:
  explicit OutputWriter(const std::string& dir) : dir_(dir) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    write_raw(name, content);
    files_.push_back({name, content.size(), crc32_of(content)});
  }

  // The manifest lists every prior write but never itself.
  void write_manifest(Manifest m) {
    m.files = files_;
    write_raw("manifest.txt", render_manifest(m));
  }

 private:
  void write_raw(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f) throw std::runtime_error("short write to '" + p.string() + "'");
  }

  fs::path dir_;
  std::vector<ManifestFileEntry> files_;
};

std::string zero_pad3(std::size_t k) {
  std::string s = std::to_string(k);
  return s.size() >= 3 ? s : std::string(3 - s.size(), '0') + s;
}

void apply_overrides(SimulationConfig& cfg, const RunOverrides& ov) {
  if (ov.seed) cfg.rng_seed = *ov.seed;
  if (ov.dt_s) cfg.time_step_s = *ov.dt_s;
  if (ov.weight_mol) cfg.species.particle_weight_mol = *ov.weight_mol;
  if (ov.snapshot_times_s) cfg.snapshot_times_s = *ov.snapshot_times_s;
  if (ov.kb0_mps) cfg.growth.initial_rate_mps = *ov.kb0_mps;
  if (ov.cap) {
    if (*ov.cap == "auto")
      cfg.growth.rate_cap_mps = 0.0;
    else if (*ov.cap == "none")
      cfg.growth.rate_cap_mps = std::numeric_limits<double>::infinity();
    else
      cfg.growth.rate_cap_mps = parse_double(*ov.cap);
  }
}

std::string validation_message(const ValidationReport& rep) {
  std::ostringstream msg;
  msg << "invalid configuration:";
  for (const ValidationIssue& issue : rep.violations)
    msg << "\n  " << issue.field << ": " << issue.message;
  return msg.str();
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---- compare helpers -------------------------------------------------------

struct LoadedRun {
  Manifest manifest;
  SimulationConfig cfg;
  std::map<std::string, std::string> files;
  bool is_reference = false;  // wrote solver fields rather than histograms
};

LoadedRun load_run_dir(const std::string& dir) {
  LoadedRun run;
  run.manifest = parse_manifest(read_file(fs::path(dir) / "manifest.txt"));
  for (const ManifestFileEntry& f : run.manifest.files) {
    std::string data = read_file(fs::path(dir) / f.name);
    if (data.size() != f.bytes || crc32_of(data) != f.crc32)
      throw std::invalid_argument(dir + "/" + f.name +
                                  ": contents do not match the manifest");
    run.files.emplace(f.name, std::move(data));
  }
  run.cfg = default_config();
  apply_config_text(run.manifest.config_text, run.cfg);
  for (const auto& [name, unused] : run.files) {
    (void)unused;
    if (name.rfind("field_", 0) == 0) {
      run.is_reference = true;
      break;
    }
  }
  return run;
}

const std::string& file_of(const LoadedRun& run, const std::string& name) {
  const auto it = run.files.find(name);
  if (it == run.files.end())
    throw std::invalid_argument("run is missing '" + name + "'");
  return it->second;
}

std::vector<std::string> files_with_prefix(const LoadedRun& run,
                                           const std::string& prefix) {
  std::vector<std::string> names;
  for (const auto& [name, unused] : run.files) {
    (void)unused;
    if (name.rfind(prefix, 0) == 0) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

RunResult particle_run_from(const LoadedRun& run) {
  RunResult r;
  r.series = parse_timeseries_csv(file_of(run, "timeseries.csv"));
  if (r.series.rows.empty())
    throw std::invalid_argument("run has an empty time series");
  for (const std::string& name : files_with_prefix(run, "snapshot_")) {
    const CountGrid g = parse_count_grid_csv(run.files.at(name));
    Snapshot s;
    s.time_s = g.time_s;
    s.nx = g.nx;
    s.ny = g.ny;
    s.x0_m = g.x0_m;
    s.x1_m = g.x1_m;
    s.y0_m = g.y0_m;
    s.y1_m = g.y1_m;
    s.in_agar = g.values;
    r.snapshots.push_back(std::move(s));
  }
  return r;
}

SolverResult solver_run_from(const LoadedRun& run) {
  SolverResult s;
  s.series = parse_solver_series_csv(file_of(run, "solver_series.csv"));
  for (const std::string& name : files_with_prefix(run, "field_"))
    s.fields.push_back(parse_field_csv(run.files.at(name)));
  return s;
}

std::optional<std::string> physics_mismatch(const SimulationConfig& a,
                                            const SimulationConfig& b) {
  if (a.geometry.radius_m != b.geometry.radius_m ||
      a.geometry.depth_m != b.geometry.depth_m)
    return "plate geometry";
  if (a.species.diffusion_m2ps != b.species.diffusion_m2ps)
    return "the diffusion coefficient";
  if (a.species.concentration_molpm3 != b.species.concentration_molpm3)
    return "the droplet concentration";
  if (a.droplet.volume_m3 != b.droplet.volume_m3 ||
      a.droplet.radius_m != b.droplet.radius_m ||
      a.droplet.center_x_m != b.droplet.center_x_m ||
      a.droplet.center_y_m != b.droplet.center_y_m ||
      a.droplet.soaking_rate_mps != b.droplet.soaking_rate_mps)
    return "the droplet parameters";
  if (a.growth.initial_rate_mps != b.growth.initial_rate_mps ||
      a.growth.doubling_period_s != b.growth.doubling_period_s ||
      a.growth.rate_cap_mps != b.growth.rate_cap_mps)
    return "the consumption schedule";
  if (a.time_step_s != b.time_step_s) return "the engine time step";
  if (a.end_time_s != b.end_time_s) return "the end time";
  std::vector<double> sa = a.snapshot_times_s;
  std::vector<double> sb = b.snapshot_times_s;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  sa.erase(std::unique(sa.begin(), sa.end()), sa.end());
  sb.erase(std::unique(sb.begin(), sb.end()), sb.end());
  if (sa != sb) return "the snapshot times";
  return std::nullopt;
}

// Two particle runs, reduced to matched radial profiles.
ComparisonReport compare_particle_runs(const LoadedRun& a, const LoadedRun& b) {
  const RunResult ra = particle_run_from(a);
  const RunResult rb = particle_run_from(b);
  if (ra.snapshots.size() != rb.snapshots.size())
    throw std::invalid_argument("runs disagree on the snapshot count");
  const double wa = a.cfg.species.particle_weight_mol;
  const double wb = b.cfg.species.particle_weight_mol;

  ComparisonReport report;
  for (std::size_t k = 0; k < ra.snapshots.size(); ++k) {
    const Snapshot& sa = ra.snapshots[k];
    const Snapshot& sb = rb.snapshots[k];
    if (sa.nx != sb.nx || sa.ny != sb.ny)
      throw std::invalid_argument("runs disagree on the histogram binning");
    if (sa.time_s != sb.time_s)
      throw std::invalid_argument("runs disagree on snapshot pairing");
    const GridSpec grid = make_grid_spec(a.cfg.geometry, sa.nx, sa.ny);
    const std::vector<std::uint8_t> inside =
        grid_inside_mask(grid, a.cfg.geometry.radius_m);
    const std::uint32_t n_rings = std::max<std::uint32_t>(8, sa.nx / 2);
    const double ring_w = a.cfg.geometry.radius_m / n_rings;

    auto rings_of = [&](const Snapshot& s, double w) {
      std::vector<double> mass(grid.size(), 0.0);
      for (std::size_t idx = 0; idx < mass.size(); ++idx)
        mass[idx] = static_cast<double>(s.in_agar[idx]) * w;
      return ring_masses_from_grid(grid, inside, mass, ring_w, n_rings);
    };
    const std::vector<double> rings_a = rings_of(sa, wa);
    const std::vector<double> rings_b = rings_of(sb, wb);
    double num = 0.0;
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (std::uint32_t i = 0; i < n_rings; ++i) {
      num += std::abs(rings_a[i] - rings_b[i]);
      sum_a += rings_a[i];
      sum_b += rings_b[i];
    }
    const double denom = std::max(sum_a, sum_b);
    report.profile.push_back({sa.time_s, denom > 0.0 ? num / denom : 0.0});
  }

  const TimeSeriesRow& la = ra.series.rows.back();
  const TimeSeriesRow& lb = rb.series.rows.back();
  const double ca = static_cast<double>(la.consumed) * wa;
  const double cb = static_cast<double>(lb.consumed) * wb;
  if (cb > 0.0)
    report.consumed_rel_err = std::abs(ca - cb) / cb;
  else
    report.consumed_rel_err =
        ca > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;

  auto gap = [](const TimeSeriesRow& row) {
    return std::abs(static_cast<double>(row.released) -
                    (static_cast<double>(row.in_agar) +
                     static_cast<double>(row.consumed)));
  };
  report.particle_conservation_gap = std::max(gap(la), gap(lb));
  return report;
}

void load_thresholds(const std::string& path, double& max_l1,
                     double& max_consumed) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(path + ": line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "max_l1")
      max_l1 = parse_double(value);
    else if (key == "max_consumed_rel_err")
      max_consumed = parse_double(value);
    else
      throw std::invalid_argument(path + ": unknown threshold '" + key + "'");
  }
}

}  // namespace

int cmd_simulate(const SimulateArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationConfig cfg;
  try {
    cfg = load_config_file(args.config_path);
    apply_overrides(cfg, args.overrides);
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitInput, "input", e.what());
  }
  if (cfg.growth.initial_rate_mps < 0.0)
    return fail(args.out_dir, kExitInput, "input",
                "the initial consumption rate is required: set "
                "growth_initial_rate_mps in the config or pass --kb0");
  const ValidationReport rep = validate_config(cfg);
  if (!rep.ok())
    return fail(args.out_dir, kExitInput, "input", validation_message(rep));

  RunResult run;
  try {
    run = run_simulation(cfg, EngineOptions{args.workers, true});
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitRuntime, "runtime", e.what());
  }

  const TimeSeriesRow& last = run.series.rows.back();
  try {
    OutputWriter w(args.out_dir);
    w.write("config.txt", render_config_text(cfg));
    w.write("timeseries.csv", render_timeseries_csv(run.series));
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
      w.write("snapshot_" + zero_pad3(k) + ".csv",
              render_count_grid_csv(run.snapshots[k], false));
      w.write("consumed_" + zero_pad3(k) + ".csv",
              render_count_grid_csv(run.snapshots[k], true));
    }
    w.write("consumed_events.csv",
            render_ledger_csv(run.final_state.consumed_ledger));
    Manifest m;
    m.command = args.command_line;
    m.version = version_string();
    m.seed = cfg.rng_seed;
    m.workers = args.workers;
    m.wall_clock_s = elapsed_s(t0);
    m.config_text = render_config_text(cfg);
    m.extra = {{"step_count", std::to_string(run.step_count)},
               {"released", std::to_string(last.released)},
               {"in_agar", std::to_string(last.in_agar)},
               {"consumed", std::to_string(last.consumed)}};
    w.write_manifest(std::move(m));
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitRuntime, "runtime", e.what());
  }

  std::cout << "simulate: " << run.step_count << " steps; released "
            << last.released << ", in agar " << last.in_agar << ", consumed "
            << last.consumed << "; outputs in " << args.out_dir << '\n';
  return kExitOk;
}

int cmd_oracle(const OracleArgs& args) {
  const auto t0 = std::chrono::steady_clock::now();
  SimulationConfig cfg;
  try {
    cfg = load_config_file(args.config_path);
    apply_overrides(cfg, args.overrides);
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitInput, "input", e.what());
  }
  if (cfg.growth.initial_rate_mps < 0.0)
    return fail(args.out_dir, kExitInput, "input",
                "the initial consumption rate is required: set "
                "growth_initial_rate_mps in the config or pass --kb0");
  const ValidationReport rep = validate_config(cfg);
  if (!rep.ok())
    return fail(args.out_dir, kExitInput, "input", validation_message(rep));

  const SolverGrid grid{args.nr, args.nz, args.dt_pde_s, args.auto_shrink};
  SolverResult result;
  try {
    result = solve(cfg, grid);
  } catch (const std::invalid_argument& e) {
    return fail(args.out_dir, kExitInput, "input", e.what());
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitRuntime, "runtime", e.what());
  }

  double residual_max = 0.0;
  for (const SolverSeriesRow& row : result.series)
    residual_max = std::max(residual_max, std::abs(row.residual_mol));
  const SolverSeriesRow& last = result.series.back();

  try {
    OutputWriter w(args.out_dir);
    w.write("config.txt", render_config_text(cfg));
    w.write("solver_series.csv", render_solver_series_csv(result.series));
    for (std::size_t k = 0; k < result.fields.size(); ++k)
      w.write("field_" + zero_pad3(k) + ".csv",
              render_field_csv(result.fields[k]));
    w.write("consumed_rings.csv",
            render_consumed_rings_csv(result.consumed_per_ring_mol,
                                      cfg.geometry.radius_m / args.nr));
    Manifest m;
    m.command = args.command_line;
    m.version = version_string();
    m.seed = cfg.rng_seed;
    m.workers = 1;
    m.wall_clock_s = elapsed_s(t0);
    m.config_text = render_config_text(cfg);
    m.extra = {{"solver_nr", std::to_string(args.nr)},
               {"solver_nz", std::to_string(args.nz)},
               {"dt_pde_requested_s", format_double(args.dt_pde_s)},
               {"dt_used_s", format_double(result.dt_used_s)},
               {"dt_was_shrunk", result.dt_was_shrunk ? "1" : "0"},
               {"released_mol", format_double(last.released_mol)},
               {"consumed_mol", format_double(last.consumed_mol)},
               {"residual_max_mol", format_double(residual_max)}};
    if (!result.notes.empty()) m.extra.emplace_back("note", result.notes);
    w.write_manifest(std::move(m));
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitRuntime, "runtime", e.what());
  }

  std::cout << "oracle: dt " << format_double(result.dt_used_s) << " s"
            << (result.dt_was_shrunk ? " (shrunk)" : "") << "; released "
            << format_double(last.released_mol) << " mol, in agar "
            << format_double(last.in_agar_mol) << " mol, consumed "
            << format_double(last.consumed_mol) << " mol, max residual "
            << format_double(residual_max) << " mol; outputs in "
            << args.out_dir << '\n';
  return kExitOk;
}

int cmd_fit(const FitArgs& args) {
  if (args.data_paths.empty())
    return fail("", kExitInput, "input", "fit needs at least one data file");
  std::string report =
      "label,h0_m,soaking_rate_mps,two_point_rate_mps,initial_area_m2,"
      "r_squared,flag\n";
  for (const std::string& path : args.data_paths) {
    AreaSeries series;
    try {
      series = parse_area_series_csv(read_file(path),
                                     fs::path(path).stem().string());
    } catch (const std::exception& e) {
      return fail("", kExitInput, "input", e.what());
    }
    if (series.samples.size() < 2)
      return fail("", kExitInput, "input",
                  series.label + ": need at least two data rows");
    const double volume = series.droplet_volume_m3 > 0.0
                              ? series.droplet_volume_m3
                              : args.volume_m3;
    if (!(volume > 0.0))
      return fail("", kExitInput, "input",
                  "no droplet volume for '" + series.label +
                      "': add a '# volume_m3 <v>' line or pass --volume");
    FitResult fit;
    try {
      fit = fit_soaking_rate(
          series, derive_h0(volume, series.samples.front().area_m2));
    } catch (const std::invalid_argument& e) {
      return fail("", kExitInput, "input", series.label + ": " + e.what());
    }
    const char* flag = fit.flag == FitFlag::ok ? "ok"
                       : fit.flag == FitFlag::no_soaking ? "no_soaking"
                                                         : "negative_rate";
    std::cout << series.label << ": K = "
              << format_double(fit.soaking_rate_mps) << " m/s (two-point "
              << format_double(fit.two_point_rate_mps) << "), h0 = "
              << format_double(fit.h0_m) << " m, R2 = "
              << format_double(fit.r_squared);
    if (fit.flag != FitFlag::ok) std::cout << ", flag = " << flag;
    std::cout << '\n';
    report += series.label + ',' + format_double(fit.h0_m) + ',' +
              format_double(fit.soaking_rate_mps) + ',' +
              format_double(fit.two_point_rate_mps) + ',' +
              format_double(fit.initial_area_m2) + ',' +
              format_double(fit.r_squared) + ',' + flag + '\n';
  }
  if (!args.out_path.empty()) {
    std::ofstream f(args.out_path, std::ios::binary | std::ios::trunc);
    if (!f)
      return fail("", kExitRuntime, "runtime",
                  "cannot write '" + args.out_path + "'");
    f.write(report.data(), static_cast<std::streamsize>(report.size()));
  }
  return kExitOk;
}

int cmd_compare(const CompareArgs& args) {
  double max_l1 = args.max_l1;
  double max_consumed = args.max_consumed_rel_err;
  LoadedRun a;
  LoadedRun b;
  try {
    if (!args.thresholds_path.empty())
      load_thresholds(args.thresholds_path, max_l1, max_consumed);
    a = load_run_dir(args.dir_a);
    b = load_run_dir(args.dir_b);
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitInput, "input", e.what());
  }
  if (const auto why = physics_mismatch(a.cfg, b.cfg))
    return fail(args.out_dir, kExitInput, "input",
                "run configurations disagree on " + *why);

  ComparisonReport report;
  try {
    if (a.is_reference && b.is_reference) {
      return fail(args.out_dir, kExitInput, "input",
                  "comparing two reference runs is not supported; pass at "
                  "least one particle run");
    } else if (!a.is_reference && !b.is_reference) {
      report = compare_particle_runs(a, b);
    } else {
      const LoadedRun& particle = a.is_reference ? b : a;
      const LoadedRun& reference = a.is_reference ? a : b;
      const SolverResult solver = solver_run_from(reference);
      const RunResult particles = particle_run_from(particle);
      report = compare_runs(solver, reference.cfg, particles, particle.cfg);
    }
  } catch (const std::invalid_argument& e) {
    return fail(args.out_dir, kExitInput, "input", e.what());
  } catch (const std::exception& e) {
    return fail(args.out_dir, kExitRuntime, "runtime", e.what());
  }

  const bool pass =
      report.max_l1() <= max_l1 && report.consumed_rel_err <= max_consumed;
  const char* verdict = pass ? "pass" : "fail";

  if (!args.out_dir.empty()) {
    try {
      OutputWriter w(args.out_dir);
      std::string csv = "time_s,l1\n";
      for (const ProfileError& p : report.profile)
        csv += format_double(p.time_s) + ',' + format_double(p.l1) + '\n';
      w.write("comparison.csv", csv);
      std::string txt = "soaksim_comparison 1\n";
      txt += "max_l1 " + format_double(report.max_l1()) + '\n';
      txt += "consumed_rel_err " + format_double(report.consumed_rel_err) + '\n';
      txt += "particle_conservation_gap " +
             format_double(report.particle_conservation_gap) + '\n';
      txt += "solver_residual_max_mol " +
             format_double(report.solver_residual_max_mol) + '\n';
      txt += "threshold_max_l1 " + format_double(max_l1) + '\n';
      txt += "threshold_max_consumed_rel_err " + format_double(max_consumed) +
             '\n';
      txt += std::string("verdict ") + verdict + '\n';
      w.write("comparison.txt", txt);
    } catch (const std::exception& e) {
      return fail("", kExitRuntime, "runtime", e.what());
    }
  }

  for (const ProfileError& p : report.profile)
    std::cout << "  t = " << format_double(p.time_s)
              << " s: L1 = " << format_double(p.l1) << '\n';
  std::cout << "compare: max profile L1 " << format_double(report.max_l1())
            << " (limit " << format_double(max_l1) << "); consumed rel err "
            << format_double(report.consumed_rel_err) << " (limit "
            << format_double(max_consumed) << "); verdict " << verdict << '\n';
  return pass ? kExitOk : kExitThreshold;
}

}  // namespace soaksim::cli
