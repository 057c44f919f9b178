#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soaksim/model.hpp"
#include "soaksim/particles.hpp"

namespace soaksim {

// Deterministic axisymmetric finite-volume reference solver on (r, z):
// conservative fluxes, explicit time stepping, the droplet source applied as
// a surface boundary flux over the shrinking footprint, and a Robin sink
// D dc/dz = k(t) c at z = 0. Used to cross-check the particle engine.

struct SolverGrid {
  std::uint32_t nr = 64;
  std::uint32_t nz = 32;
  double dt_s = 0.0;        // 0: derive from the stability bound
  bool auto_shrink = true;  // shrink an unstable dt instead of failing
};

struct Field {
  double time_s = 0.0;
  std::uint32_t nr = 0;
  std::uint32_t nz = 0;
  double dr_m = 0.0;
  double dz_m = 0.0;
  std::vector<double> c_molpm3;  // row-major, j * nr + i
};

struct SolverSeriesRow {
  double time_s;
  double released_mol;
  double in_agar_mol;
  double consumed_mol;
  double residual_mol;  // released - consumed - in_agar
};

struct SolverResult {
  std::vector<Field> fields;            // at the configured snapshot times
  std::vector<SolverSeriesRow> series;  // t = 0 plus one row per internal step
  std::vector<double> consumed_per_ring_mol;  // cumulative Robin sink by ring
  double dt_used_s = 0.0;
  bool dt_was_shrunk = false;
  std::string notes;
};

// Explicit solve to cfg.end_time_s, landing exactly on every snapshot time.
// Throws std::invalid_argument for inputs the solver cannot represent
// (nr/nz < 8, off-axis droplet) and std::runtime_error for a stability
// violation with auto_shrink disabled or a negative concentration beyond
// -1e-12 * max(c).
SolverResult solve(const SimulationConfig& cfg, const SolverGrid& grid);

// z-integrated mass per native radial ring (mol), ring width = field dr.
std::vector<double> ring_masses(const Field& f);

// Ring reduction of an (x, y) grid of per-bin masses: each unmasked bin's
// mass joins the ring under its centre. Shared by both comparison sides so
// binning artifacts cancel.
std::vector<double> ring_masses_from_grid(const GridSpec& grid,
                                          const std::vector<std::uint8_t>& inside,
                                          const std::vector<double>& bin_mass_mol,
                                          double ring_w_m, std::uint32_t n_rings);

// Projects ring masses onto the (x, y) binning by bin-centre sampling of the
// ring's areal density; masked bins stay zero.
std::vector<double> grid_from_ring_masses(const GridSpec& grid,
                                          const std::vector<std::uint8_t>& inside,
                                          const std::vector<double>& ring_mass_mol,
                                          double ring_w_m);

struct ProfileError {
  double time_s;
  double l1;  // sum |a - b| / max(sum a, sum b); 0 when both profiles are empty
};

struct ComparisonReport {
  std::vector<ProfileError> profile;        // one row per snapshot time
  double consumed_rel_err = 0.0;            // vs the solver total at the end
  double particle_conservation_gap = 0.0;   // |released - in_agar - consumed|
  double solver_residual_max_mol = 0.0;
  double max_l1() const;
};

// Compares matched runs via z-integrated radial profiles at every snapshot
// time plus the total-consumed relative error. Throws std::invalid_argument
// when the two configs disagree on physics, times, or binning.
ComparisonReport compare_runs(const SolverResult& solver,
                              const SimulationConfig& solver_cfg,
                              const RunResult& particles,
                              const SimulationConfig& particle_cfg);

}  // namespace soaksim
