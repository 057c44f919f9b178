#include "soaksim/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "soaksim/droplet.hpp"
#include "soaksim/growth.hpp"

namespace soaksim {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

SolverResult solve(const SimulationConfig& cfg, const SolverGrid& grid) {
  if (grid.nr < 8 || grid.nz < 8)
    throw std::invalid_argument("reference solver needs nr >= 8 and nz >= 8");
  if (cfg.droplet.center_x_m != 0.0 || cfg.droplet.center_y_m != 0.0)
    throw std::invalid_argument(
        "the axisymmetric reference solver requires the droplet centred on "
        "the plate axis");

  const std::uint32_t nr = grid.nr;
  const std::uint32_t nz = grid.nz;
  const double dr = cfg.geometry.radius_m / nr;
  const double dz = cfg.geometry.depth_m / nz;
  const double D = cfg.species.diffusion_m2ps;

  const SoakingModel model = make_soaking_model(cfg);
  const ConsumptionSchedule schedule = make_consumption_schedule(cfg);
  const double k_max = max_schedule_rate(cfg);

  // Sufficient positivity bound for the explicit update: every cell keeps a
  // non-negative coefficient on its own old value, surface sink included
  // (the sink uses the flux-consistent effective rate, see the advance step).
  const double k_eff_max =
      k_max > 0.0 ? 1.0 / (1.0 / k_max + dz / (2.0 * D)) : 0.0;
  const double dt_max =
      1.0 / (2.0 * D * (1.0 / (dr * dr) + 1.0 / (dz * dz)) + k_eff_max / dz);

  SolverResult out;
  std::ostringstream notes;
  double dt_req = 0.0;
  if (grid.dt_s > 0.0) {
    if (grid.dt_s > dt_max) {
      if (!grid.auto_shrink) {
        std::ostringstream msg;
        msg << "solver time step " << grid.dt_s
            << " s violates the positivity bound " << dt_max << " s";
        throw std::runtime_error(msg.str());
      }
      dt_req = 0.9 * dt_max;
      out.dt_was_shrunk = true;
      notes << "time step shrunk from " << grid.dt_s << " s to " << dt_req
            << " s to keep the explicit update positive; ";
    } else {
      dt_req = grid.dt_s;
    }
  } else {
    dt_req = 0.9 * dt_max;
    // Release lands once per step at the step-start footprint radius, the
    // same convention the particle engine uses, so the derived step must not
    // chop the source more coarsely than the engine or the two radial source
    // layouts drift apart even though both conserve mass.
    if (cfg.time_step_s > 0.0) dt_req = std::min(dt_req, cfg.time_step_s);
    notes << "time step auto-derived as " << dt_req << " s; ";
  }

  std::vector<double> ring_top_area(nr);   // z-normal face of ring i
  std::vector<double> ring_volume(nr);
  std::vector<double> radial_face_area(nr + 1);  // r-normal face at r = i dr
  for (std::uint32_t i = 0; i < nr; ++i) {
    ring_top_area[i] = kPi * dr * dr * (2.0 * i + 1.0);
    ring_volume[i] = ring_top_area[i] * dz;
  }
  for (std::uint32_t i = 0; i <= nr; ++i)
    radial_face_area[i] = 2.0 * kPi * (dr * i) * dz;

  const std::size_t n_cells = static_cast<std::size_t>(nr) * nz;
  std::vector<double> mass(n_cells, 0.0);      // mol per cell
  std::vector<double> mass_new(n_cells, 0.0);
  out.consumed_per_ring_mol.assign(nr, 0.0);

  double t = 0.0;
  double released = 0.0;
  double consumed = 0.0;

  auto push_row = [&]() {
    double in_agar = 0.0;
    double min_m = 0.0;
    double max_m = 0.0;
    for (double m : mass) {
      in_agar += m;
      min_m = std::min(min_m, m);
      max_m = std::max(max_m, m);
    }
    if (min_m < -1e-12 * std::max(max_m, 1e-300))
      throw std::runtime_error(
          "reference solver produced a negative concentration beyond "
          "round-off; the time step is too large");
    out.series.push_back({t, released, in_agar, consumed,
                          released - in_agar - consumed});
  };

  auto push_field = [&]() {
    Field f;
    f.time_s = t;
    f.nr = nr;
    f.nz = nz;
    f.dr_m = dr;
    f.dz_m = dz;
    f.c_molpm3.resize(n_cells);
    for (std::uint32_t j = 0; j < nz; ++j)
      for (std::uint32_t i = 0; i < nr; ++i)
        f.c_molpm3[static_cast<std::size_t>(j) * nr + i] =
            mass[static_cast<std::size_t>(j) * nr + i] / ring_volume[i];
    out.fields.push_back(std::move(f));
  };

  std::vector<double> footprint(nr);
  auto footprint_weights = [&](double radius_m) {
    double total = 0.0;
    for (std::uint32_t i = 0; i < nr; ++i) {
      const double a = std::min(radius_m, dr * i);
      const double b = std::min(radius_m, dr * (i + 1));
      footprint[i] = kPi * (b * b - a * a);
      total += footprint[i];
    }
    if (total > 0.0)
      for (double& w : footprint) w /= total;
  };

  // One explicit update over [t0, t1]; fluxes and the sink use the state at
  // t0, the source adds the exact interval release so mass telescopes.
  auto advance = [&](double t0, double t1) {
    const double dt = t1 - t0;
    const double k_now = consumption_rate_at(schedule, t0);
    mass_new = mass;
    for (std::uint32_t j = 0; j < nz; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nr;
      for (std::uint32_t i = 0; i + 1 < nr; ++i) {
        const double c0 = mass[row + i] / ring_volume[i];
        const double c1 = mass[row + i + 1] / ring_volume[i + 1];
        const double f = D * (c1 - c0) / dr * radial_face_area[i + 1] * dt;
        mass_new[row + i] += f;
        mass_new[row + i + 1] -= f;
      }
    }
    for (std::uint32_t j = 0; j + 1 < nz; ++j) {
      const std::size_t row = static_cast<std::size_t>(j) * nr;
      for (std::uint32_t i = 0; i < nr; ++i) {
        const double c0 = mass[row + i] / ring_volume[i];
        const double c1 = mass[row + nr + i] / ring_volume[i];
        const double g = D * (c1 - c0) / dz * ring_top_area[i] * dt;
        mass_new[row + i] += g;
        mass_new[row + nr + i] -= g;
      }
    }
    if (k_now > 0.0) {
      // Flux-consistent surface sink: the uptake acts on the concentration at
      // the surface, not the top-cell average, and the two differ by the
      // half-cell diffusion drop. Matching the uptake flux k*c_surface with
      // the diffusive supply D*(c_cell - c_surface)/(dz/2) gives an effective
      // cell-average rate k/(1 + k*dz/(2D)), which also stays bounded by
      // 2D/dz when the uptake is diffusion-limited.
      const double k_eff = 1.0 / (1.0 / k_now + dz / (2.0 * D));
      for (std::uint32_t i = 0; i < nr; ++i) {
        const double snk =
            k_eff * (mass[i] / ring_volume[i]) * ring_top_area[i] * dt;
        mass_new[i] -= snk;
        out.consumed_per_ring_mol[i] += snk;
        consumed += snk;
      }
    }
    const double dm = cumulative_release(model, t1) - cumulative_release(model, t0);
    if (dm > 0.0) {
      // Deposit at the interval-start footprint radius: the stochastic engine
      // places each interval's release inside the footprint as it stood when
      // the interval began, so using the same convention here keeps the two
      // solvers' source terms aligned at matching step sizes.
      footprint_weights(radius_at(model, t0));
      for (std::uint32_t i = 0; i < nr; ++i) {
        const double src = dm * footprint[i];
        if (src > 0.0) {
          mass_new[i] += src;
          released += src;
        }
      }
    }
    mass.swap(mass_new);
    t = t1;
  };

  const std::vector<double> snap_times = sorted_unique(cfg.snapshot_times_s);
  std::vector<double> marks = snap_times;
  if (cfg.end_time_s > 0.0 &&
      (marks.empty() || marks.back() != cfg.end_time_s))
    marks.push_back(cfg.end_time_s);

  auto is_snapshot_time = [&](double tm) {
    return std::binary_search(snap_times.begin(), snap_times.end(), tm);
  };

  push_row();
  if (is_snapshot_time(0.0)) push_field();

  double prev = 0.0;
  for (double mark : marks) {
    if (mark <= prev) continue;  // t = 0 is already emitted
    const double len = mark - prev;
    const auto n_sub = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(len / dt_req - 1e-9)));
    const double sub = len / static_cast<double>(n_sub);
    out.dt_used_s = std::max(out.dt_used_s, sub);
    for (std::uint64_t s = 0; s < n_sub; ++s) {
      const double t0 = prev + sub * static_cast<double>(s);
      const double t1 = (s + 1 == n_sub) ? mark : prev + sub * static_cast<double>(s + 1);
      advance(t0, t1);
      push_row();
    }
    if (is_snapshot_time(mark)) push_field();
    prev = mark;
  }

  out.notes = notes.str();
  return out;
}

std::vector<double> ring_masses(const Field& f) {
  std::vector<double> rm(f.nr, 0.0);
  for (std::uint32_t i = 0; i < f.nr; ++i) {
    const double volume = kPi * f.dr_m * f.dr_m * (2.0 * i + 1.0) * f.dz_m;
    double sum = 0.0;
    for (std::uint32_t j = 0; j < f.nz; ++j)
      sum += f.c_molpm3[static_cast<std::size_t>(j) * f.nr + i];
    rm[i] = sum * volume;
  }
  return rm;
}

std::vector<double> ring_masses_from_grid(
    const GridSpec& grid, const std::vector<std::uint8_t>& inside,
    const std::vector<double>& bin_mass_mol, double ring_w_m,
    std::uint32_t n_rings) {
  if (inside.size() != grid.size() || bin_mass_mol.size() != grid.size())
    throw std::invalid_argument("ring reduction: grid and mask sizes differ");
  if (!(ring_w_m > 0.0) || n_rings == 0)
    throw std::invalid_argument("ring reduction: bad ring layout");
  std::vector<double> rm(n_rings, 0.0);
  const double wx = (grid.x1_m - grid.x0_m) / grid.nx;
  const double wy = (grid.y1_m - grid.y0_m) / grid.ny;
  for (std::uint32_t iy = 0; iy < grid.ny; ++iy) {
    const double yc = grid.y0_m + wy * (iy + 0.5);
    for (std::uint32_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t b = static_cast<std::size_t>(iy) * grid.nx + ix;
      if (!inside[b] || bin_mass_mol[b] == 0.0) continue;
      const double xc = grid.x0_m + wx * (ix + 0.5);
      const double r = std::hypot(xc, yc);
      const auto ring = static_cast<std::uint32_t>(
          std::min<double>(n_rings - 1, std::floor(r / ring_w_m)));
      rm[ring] += bin_mass_mol[b];
    }
  }
  return rm;
}

std::vector<double> grid_from_ring_masses(
    const GridSpec& grid, const std::vector<std::uint8_t>& inside,
    const std::vector<double>& ring_mass_mol, double ring_w_m) {
  if (inside.size() != grid.size())
    throw std::invalid_argument("ring projection: grid and mask sizes differ");
  if (!(ring_w_m > 0.0) || ring_mass_mol.empty())
    throw std::invalid_argument("ring projection: bad ring layout");
  const auto n_rings = static_cast<std::uint32_t>(ring_mass_mol.size());
  std::vector<double> out(grid.size(), 0.0);
  const double wx = (grid.x1_m - grid.x0_m) / grid.nx;
  const double wy = (grid.y1_m - grid.y0_m) / grid.ny;
  const double bin_area = grid.bin_area_m2();
  for (std::uint32_t iy = 0; iy < grid.ny; ++iy) {
    const double yc = grid.y0_m + wy * (iy + 0.5);
    for (std::uint32_t ix = 0; ix < grid.nx; ++ix) {
      const std::size_t b = static_cast<std::size_t>(iy) * grid.nx + ix;
      if (!inside[b]) continue;
      const double xc = grid.x0_m + wx * (ix + 0.5);
      const double r = std::hypot(xc, yc);
      const auto ring = static_cast<std::uint32_t>(
          std::min<double>(n_rings - 1, std::floor(r / ring_w_m)));
      const double ring_area =
          kPi * ring_w_m * ring_w_m * (2.0 * ring + 1.0);
      out[b] = ring_mass_mol[ring] / ring_area * bin_area;
    }
  }
  return out;
}

double ComparisonReport::max_l1() const {
  double m = 0.0;
  for (const ProfileError& p : profile) m = std::max(m, p.l1);
  return m;
}

ComparisonReport compare_runs(const SolverResult& solver,
                              const SimulationConfig& solver_cfg,
                              const RunResult& particles,
                              const SimulationConfig& particle_cfg) {
  auto mismatch = [](const char* what) {
    throw std::invalid_argument(std::string("comparison inputs disagree on ") +
                                what);
  };
  if (solver_cfg.geometry.radius_m != particle_cfg.geometry.radius_m ||
      solver_cfg.geometry.depth_m != particle_cfg.geometry.depth_m)
    mismatch("plate geometry");
  if (solver_cfg.species.diffusion_m2ps != particle_cfg.species.diffusion_m2ps ||
      solver_cfg.species.concentration_molpm3 !=
          particle_cfg.species.concentration_molpm3)
    mismatch("species parameters");
  if (solver_cfg.droplet.volume_m3 != particle_cfg.droplet.volume_m3 ||
      solver_cfg.droplet.radius_m != particle_cfg.droplet.radius_m ||
      solver_cfg.droplet.center_x_m != particle_cfg.droplet.center_x_m ||
      solver_cfg.droplet.center_y_m != particle_cfg.droplet.center_y_m ||
      solver_cfg.droplet.soaking_rate_mps != particle_cfg.droplet.soaking_rate_mps)
    mismatch("droplet parameters");
  if (solver_cfg.growth.initial_rate_mps != particle_cfg.growth.initial_rate_mps ||
      solver_cfg.growth.doubling_period_s != particle_cfg.growth.doubling_period_s ||
      solver_cfg.growth.rate_cap_mps != particle_cfg.growth.rate_cap_mps)
    mismatch("consumption schedule");
  if (solver_cfg.end_time_s != particle_cfg.end_time_s)
    mismatch("end time");
  {
    const std::vector<double> a = sorted_unique(solver_cfg.snapshot_times_s);
    const std::vector<double> b = sorted_unique(particle_cfg.snapshot_times_s);
    if (a != b) mismatch("snapshot times");
  }
  if (solver.fields.size() != particles.snapshots.size())
    mismatch("snapshot counts");

  const double w = particle_cfg.species.particle_weight_mol;
  ComparisonReport report;
  for (std::size_t k = 0; k < solver.fields.size(); ++k) {
    const Field& field = solver.fields[k];
    const Snapshot& snap = particles.snapshots[k];
    const double tol = std::max(0.5 * particle_cfg.time_step_s, 1e-9);
    if (std::abs(field.time_s - snap.time_s) > tol)
      mismatch("snapshot pairing");

    const GridSpec grid =
        make_grid_spec(particle_cfg.geometry, snap.nx, snap.ny);
    const std::vector<std::uint8_t> inside =
        grid_inside_mask(grid, particle_cfg.geometry.radius_m);

    std::vector<double> particle_mass(grid.size(), 0.0);
    for (std::size_t b = 0; b < particle_mass.size(); ++b)
      particle_mass[b] = static_cast<double>(snap.in_agar[b]) * w;
    const std::vector<double> particle_rings = ring_masses_from_grid(
        grid, inside, particle_mass, field.dr_m, field.nr);

    // The solver profile goes through the identical grid-and-back reduction
    // so the centre-sampling bias hits both sides the same way.
    const std::vector<double> solver_grid_mass = grid_from_ring_masses(
        grid, inside, ring_masses(field), field.dr_m);
    const std::vector<double> solver_rings = ring_masses_from_grid(
        grid, inside, solver_grid_mass, field.dr_m, field.nr);

    double num = 0.0;
    double sum_p = 0.0;
    double sum_s = 0.0;
    for (std::uint32_t i = 0; i < field.nr; ++i) {
      num += std::abs(particle_rings[i] - solver_rings[i]);
      sum_p += particle_rings[i];
      sum_s += solver_rings[i];
    }
    const double denom = std::max(sum_p, sum_s);
    report.profile.push_back({field.time_s, denom > 0.0 ? num / denom : 0.0});
  }

  const TimeSeriesRow& last = particles.series.rows.back();
  const double particle_consumed = static_cast<double>(last.consumed) * w;
  const double solver_consumed =
      solver.series.empty() ? 0.0 : solver.series.back().consumed_mol;
  if (solver_consumed > 0.0)
    report.consumed_rel_err =
        std::abs(particle_consumed - solver_consumed) / solver_consumed;
  else
    report.consumed_rel_err =
        particle_consumed > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;

  report.particle_conservation_gap = std::abs(
      static_cast<double>(last.released) -
      (static_cast<double>(last.in_agar) + static_cast<double>(last.consumed)));

  for (const SolverSeriesRow& row : solver.series)
    report.solver_residual_max_mol =
        std::max(report.solver_residual_max_mol, std::abs(row.residual_mol));
  return report;
}

}  // namespace soaksim
