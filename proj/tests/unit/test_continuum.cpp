#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "soaksim/continuum.hpp"
#include "soaksim/droplet.hpp"
#include "soaksim/model.hpp"
#include "soaksim/particles.hpp"

using namespace soaksim;

namespace {

// Narrow plate fully covered by the droplet: the dynamics collapse to a 1-D
// column in z, which has a closed-form image-series solution.
SimulationConfig column_config() {
  SimulationConfig cfg = default_config();
  cfg.geometry.radius_m = 0.01;
  cfg.geometry.depth_m = 2e-3;
  cfg.droplet.volume_m3 = 1e-9;
  cfg.droplet.radius_m = 0.01;            // covers the whole surface
  cfg.droplet.soaking_rate_mps = 1e-5;    // soak time ~0.32 s: a pulse source
  cfg.growth.initial_rate_mps = 0.0;
  cfg.end_time_s = 20000.0;
  cfg.snapshot_times_s = {20000.0};
  return cfg;
}

// Concentration at depth z and time t for a unit pulse released at z = 0
// into a slab [0, L] with reflecting ends, as an image sum.
double slab_pulse_concentration(double z, double t, double diffusion,
                                double depth) {
  const double denom = std::sqrt(4.0 * std::numbers::pi * diffusion * t);
  double sum = 0.0;
  for (int n = -6; n <= 6; ++n) {
    const double d = z - 2.0 * n * depth;
    sum += std::exp(-d * d / (4.0 * diffusion * t));
  }
  return 2.0 * sum / denom;
}

}  // namespace

TEST_CASE("solver rejects unrepresentable inputs") {
  SimulationConfig cfg = column_config();
  SolverGrid grid;

  grid.nr = 4;  // too coarse
  grid.nz = 32;
  CHECK_THROWS_AS(solve(cfg, grid), std::invalid_argument);

  grid.nr = 16;
  grid.nz = 4;
  CHECK_THROWS_AS(solve(cfg, grid), std::invalid_argument);

  grid.nz = 32;
  cfg.droplet.center_x_m = 1e-3;  // axisymmetric solver: droplet on axis only
  CHECK_THROWS_AS(solve(cfg, grid), std::invalid_argument);
}

TEST_CASE("zero soaking and zero consumption keep every field empty") {
  SimulationConfig cfg = column_config();
  cfg.droplet.soaking_rate_mps = 0.0;
  cfg.end_time_s = 600.0;
  cfg.snapshot_times_s = {0.0, 600.0};
  SolverGrid grid;
  grid.nr = 8;
  grid.nz = 8;
  const SolverResult res = solve(cfg, grid);

  REQUIRE(res.fields.size() == 2);
  for (const Field& f : res.fields)
    for (double c : f.c_molpm3) CHECK(c == 0.0);
  for (const SolverSeriesRow& r : res.series) {
    CHECK(r.released_mol == 0.0);
    CHECK(r.in_agar_mol == 0.0);
    CHECK(r.consumed_mol == 0.0);
    CHECK(r.residual_mol == 0.0);
  }
}

TEST_CASE("unstable requested step: shrink when allowed, fail when not") {
  SimulationConfig cfg = column_config();
  cfg.end_time_s = 100.0;
  cfg.snapshot_times_s = {100.0};

  SolverGrid grid;
  grid.nr = 8;
  grid.nz = 32;
  grid.dt_s = 1e6;  // far beyond the positivity bound

  grid.auto_shrink = false;
  CHECK_THROWS_WITH_AS(solve(cfg, grid),
                       doctest::Contains("positivity bound"),
                       std::runtime_error);

  grid.auto_shrink = true;
  const SolverResult res = solve(cfg, grid);
  CHECK(res.dt_was_shrunk);
  CHECK(res.dt_used_s < 1e6);
  CHECK_FALSE(res.notes.empty());
}

TEST_CASE("column problem matches the closed-form pulse profile") {
  const SimulationConfig cfg = column_config();
  SolverGrid grid;
  grid.nr = 8;
  grid.nz = 64;
  const SolverResult res = solve(cfg, grid);

  CHECK_FALSE(res.dt_was_shrunk);
  CHECK(res.dt_used_s > 0.0);

  REQUIRE(res.fields.size() == 1);
  const Field& f = res.fields[0];
  CHECK(f.time_s == 20000.0);  // snapshot landed exactly
  REQUIRE(f.nr == 8);
  REQUIRE(f.nz == 64);

  // A full-cover source keeps the column laterally uniform.
  for (std::uint32_t j = 0; j < f.nz; ++j) {
    double lo = f.c_molpm3[j * f.nr];
    double hi = lo;
    for (std::uint32_t i = 1; i < f.nr; ++i) {
      lo = std::min(lo, f.c_molpm3[j * f.nr + i]);
      hi = std::max(hi, f.c_molpm3[j * f.nr + i]);
    }
    CHECK(hi - lo <= 1e-10 * std::max(hi, 1e-300));
  }

  // Released stock: the droplet drained completely long before 20000 s.
  const SoakingModel m = make_soaking_model(cfg);
  const double stock = m.concentration_molpm3 * m.initial_volume_m3;
  CHECK(res.series.back().released_mol ==
        doctest::Approx(stock).epsilon(1e-12));

  // Vertical profile against the image-series solution, cell by cell.
  const double area = std::numbers::pi * cfg.geometry.radius_m *
                      cfg.geometry.radius_m;
  const double dz = f.dz_m;
  double max_c = 0.0;
  for (std::uint32_t j = 0; j < f.nz; ++j)
    max_c = std::max(max_c, f.c_molpm3[j * f.nr]);
  for (std::uint32_t j = 0; j < f.nz; ++j) {
    const double z = (j + 0.5) * dz;
    const double exact =
        stock / area *
        slab_pulse_concentration(z, 20000.0, cfg.species.diffusion_m2ps,
                                 cfg.geometry.depth_m);
    const double got = f.c_molpm3[j * f.nr];
    if (exact > 0.01 * max_c) {
      CHECK(got == doctest::Approx(exact).epsilon(0.02));
    }
  }
}

TEST_CASE("mass ledger closes to round-off on a consuming run") {
  SimulationConfig cfg = default_config();
  cfg.geometry.radius_m = 0.02;
  cfg.growth.initial_rate_mps = 1e-7;
  cfg.end_time_s = 3600.0;
  cfg.snapshot_times_s = {0.0, 1800.0, 3600.0};

  SolverGrid grid;
  grid.nr = 16;
  grid.nz = 8;
  const SolverResult res = solve(cfg, grid);

  const SoakingModel m = make_soaking_model(cfg);
  const double released_exact = cumulative_release(m, 3600.0);
  CHECK(res.series.back().released_mol ==
        doctest::Approx(released_exact).epsilon(1e-12));

  double prev_consumed = 0.0;
  for (const SolverSeriesRow& r : res.series) {
    CHECK(r.in_agar_mol >= 0.0);
    CHECK(r.consumed_mol >= prev_consumed);
    prev_consumed = r.consumed_mol;
    // Conservative flux bookkeeping: the residual is orders of magnitude
    // below the advertised 1e-10 of released mass.
    CHECK(std::abs(r.residual_mol) <=
          1e-10 * std::max(r.released_mol, 1e-300));
  }
  CHECK(res.series.back().consumed_mol > 0.0);

  double ring_sum = 0.0;
  for (double c : res.consumed_per_ring_mol) ring_sum += c;
  CHECK(ring_sum ==
        doctest::Approx(res.series.back().consumed_mol).epsilon(1e-12));

  // Snapshots land on the requested times in order.
  REQUIRE(res.fields.size() == 3);
  CHECK(res.fields[0].time_s == 0.0);
  CHECK(res.fields[1].time_s == 1800.0);
  CHECK(res.fields[2].time_s == 3600.0);

  // z-integrated ring masses reproduce the in-agar total of the last row.
  const std::vector<double> rings = ring_masses(res.fields.back());
  double mass = 0.0;
  for (double v : rings) mass += v;
  CHECK(mass == doctest::Approx(res.series.back().in_agar_mol).epsilon(1e-9));
}

TEST_CASE("a strong constant sink eventually consumes the whole release") {
  SimulationConfig cfg = column_config();
  cfg.growth.initial_rate_mps = 5e-7;
  cfg.growth.rate_cap_mps = 5e-7;
  cfg.growth.doubling_period_s = 1e9;  // effectively constant
  cfg.end_time_s = 160000.0;
  cfg.snapshot_times_s = {160000.0};

  SolverGrid grid;
  grid.nr = 8;
  grid.nz = 32;
  const SolverResult res = solve(cfg, grid);

  const SolverSeriesRow& last = res.series.back();
  CHECK(last.released_mol > 0.0);
  CHECK(last.consumed_mol >= 0.98 * last.released_mol);
  CHECK(last.in_agar_mol <= 0.02 * last.released_mol);
  CHECK(std::abs(last.residual_mol) <= 1e-10 * last.released_mol);
}

TEST_CASE("ring projection and reduction never move mass between rings") {
  // Projecting a single ring onto the grid and gathering back must return
  // every molecule to that same ring: both directions assign a bin by the
  // ring that contains its centre, so the composition is diagonal.  The
  // diagonal factor is the pixelised-annulus area over the true annulus
  // area; it is not 1 on a coarse grid, but it must stay bounded and it is
  // the same factor the particle histogram picks up, which is why matched
  // comparisons cancel it.
  PlateGeometry geom;
  geom.radius_m = 0.02;
  const GridSpec grid = make_grid_spec(geom, 64, 64);
  const auto inside = grid_inside_mask(grid, geom.radius_m);

  const std::uint32_t n_rings = 32;
  const double ring_w = geom.radius_m / n_rings;
  for (std::uint32_t hot : {0u, 5u, 17u, 30u}) {
    std::vector<double> rings(n_rings, 0.0);
    rings[hot] = 1.0;
    const std::vector<double> projected =
        grid_from_ring_masses(grid, inside, rings, ring_w);
    const std::vector<double> back =
        ring_masses_from_grid(grid, inside, projected, ring_w, n_rings);
    for (std::uint32_t i = 0; i < n_rings; ++i) {
      if (i == hot) {
        CHECK(back[i] > 0.25);
        CHECK(back[i] < 1.75);
      } else {
        CHECK(back[i] == 0.0);
      }
    }
  }
}

TEST_CASE("matched ring reductions cancel grid pixelisation") {
  // The comparison pipeline reduces the particle histogram to rings and
  // pushes the solver profile through the grid and back before reducing it
  // the same way.  For one underlying smooth density the two paths must
  // agree closely even on a coarse grid, because each ring's pixelisation
  // factor multiplies both sides alike.
  PlateGeometry geom;
  geom.radius_m = 0.02;
  const GridSpec grid = make_grid_spec(geom, 64, 64);
  const auto inside = grid_inside_mask(grid, geom.radius_m);

  const std::uint32_t n_rings = 32;
  const double ring_w = geom.radius_m / n_rings;
  const double sigma2 = 4e-5;  // smooth radial bump, a few rings wide
  auto density = [&](double r) { return std::exp(-r * r / (2.0 * sigma2)); };

  // Solver side: ring masses sampled from the density at ring centres.
  std::vector<double> solver_rings(n_rings);
  for (std::uint32_t i = 0; i < n_rings; ++i) {
    const double r = (i + 0.5) * ring_w;
    const double ring_area =
        std::numbers::pi * ring_w * ring_w * (2.0 * i + 1.0);
    solver_rings[i] = density(r) * ring_area;
  }
  const std::vector<double> solver_grid =
      grid_from_ring_masses(grid, inside, solver_rings, ring_w);
  const std::vector<double> solver_back =
      ring_masses_from_grid(grid, inside, solver_grid, ring_w, n_rings);

  // Particle side: the same density binned into grid cells at bin centres.
  const double wx = (grid.x1_m - grid.x0_m) / grid.nx;
  const double wy = (grid.y1_m - grid.y0_m) / grid.ny;
  std::vector<double> particle_grid(grid.size(), 0.0);
  for (std::uint32_t iy = 0; iy < grid.ny; ++iy) {
    for (std::uint32_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t b = static_cast<std::size_t>(iy) * grid.nx + ix;
      if (!inside[b]) continue;
      const double xc = grid.x0_m + wx * (ix + 0.5);
      const double yc = grid.y0_m + wy * (iy + 0.5);
      particle_grid[b] = density(std::hypot(xc, yc)) * grid.bin_area_m2();
    }
  }
  const std::vector<double> particle_rings =
      ring_masses_from_grid(grid, inside, particle_grid, ring_w, n_rings);

  double l1 = 0.0;
  double total = 0.0;
  for (std::uint32_t i = 0; i < n_rings; ++i) {
    l1 += std::abs(particle_rings[i] - solver_back[i]);
    total += particle_rings[i];
  }
  CHECK(total > 0.0);
  CHECK(l1 / total < 0.02);
}

TEST_CASE("comparison refuses runs whose physics disagree") {
  SimulationConfig solver_cfg = column_config();
  solver_cfg.end_time_s = 60.0;
  solver_cfg.snapshot_times_s = {0.0, 60.0};
  solver_cfg.species.particle_weight_mol = 5e-9;

  SolverGrid grid;
  grid.nr = 8;
  grid.nz = 8;
  const SolverResult solver_res = solve(solver_cfg, grid);

  SimulationConfig particle_cfg = solver_cfg;
  particle_cfg.species.diffusion_m2ps = 1e-10;  // mismatched physics
  EngineOptions opt;
  opt.workers = 1;
  const RunResult particle_res = run_simulation(particle_cfg, opt);

  CHECK_THROWS_WITH_AS(
      compare_runs(solver_res, solver_cfg, particle_res, particle_cfg),
      doctest::Contains("disagree"), std::invalid_argument);

  // Matched configs compare cleanly.
  const RunResult matched = run_simulation(solver_cfg, opt);
  const ComparisonReport report =
      compare_runs(solver_res, solver_cfg, matched, solver_cfg);
  REQUIRE(report.profile.size() == 2);
  CHECK(report.profile[0].time_s == 0.0);
  CHECK(report.profile[1].time_s == 60.0);
  CHECK(report.max_l1() >= 0.0);
  CHECK(report.max_l1() <= 2.0);
  CHECK(report.particle_conservation_gap == 0.0);
}

TEST_CASE("max_l1 picks the worst snapshot") {
  ComparisonReport r;
  r.profile = {{0.0, 0.01}, {10.0, 0.2}, {20.0, 0.05}};
  CHECK(r.max_l1() == 0.2);
  ComparisonReport empty;
  CHECK(empty.max_l1() == 0.0);
}
