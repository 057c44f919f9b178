#include "soaksim/particles.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

namespace soaksim {

namespace {

// Below this population the per-step thread spawn costs more than it saves.
constexpr std::size_t kParallelThreshold = 8192;

unsigned effective_workers(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

}  // namespace

GridSpec make_grid_spec(const PlateGeometry& geom, std::uint32_t nx,
                        std::uint32_t ny) {
  if (nx < 1 || ny < 1)
    throw std::invalid_argument("histogram needs at least one bin per axis");
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.x0_m = -geom.radius_m;
  g.x1_m = geom.radius_m;
  g.y0_m = -geom.radius_m;
  g.y1_m = geom.radius_m;
  return g;
}

std::vector<std::uint8_t> grid_inside_mask(const GridSpec& grid,
                                           double plate_radius_m) {
  std::vector<std::uint8_t> mask(grid.size(), 1);
  const double wx = (grid.x1_m - grid.x0_m) / grid.nx;
  const double wy = (grid.y1_m - grid.y0_m) / grid.ny;
  const double rp2 = plate_radius_m * plate_radius_m;
  for (std::uint32_t iy = 0; iy < grid.ny; ++iy) {
    const double by0 = grid.y0_m + wy * iy;
    const double by1 = by0 + wy;
    const double py = std::clamp(0.0, by0, by1);  // rect point nearest the axis
    for (std::uint32_t ix = 0; ix < grid.nx; ++ix) {
      const double bx0 = grid.x0_m + wx * ix;
      const double bx1 = bx0 + wx;
      const double px = std::clamp(0.0, bx0, bx1);
      if (px * px + py * py > rp2)
        mask[static_cast<std::size_t>(iy) * grid.nx + ix] = 0;
    }
  }
  return mask;
}

Snapshot bin_snapshot(const std::vector<Particle>& particles,
                      const PlateGeometry& geom, std::uint32_t nx,
                      std::uint32_t ny) {
  const GridSpec grid = make_grid_spec(geom, nx, ny);
  Snapshot s;
  s.nx = nx;
  s.ny = ny;
  s.x0_m = grid.x0_m;
  s.x1_m = grid.x1_m;
  s.y0_m = grid.y0_m;
  s.y1_m = grid.y1_m;
  s.in_agar.assign(grid.size(), 0);
  s.consumed.assign(grid.size(), 0);
  s.inside = grid_inside_mask(grid, geom.radius_m);
  for (const Particle& p : particles) ++s.in_agar[grid.bin_of(p.x_m, p.y_m)];
  return s;
}

Engine::Engine(const SimulationConfig& cfg, EngineOptions opt)
    : cfg_(cfg),
      opt_(opt),
      model_(make_soaking_model(cfg)),
      sampler_(model_, cfg.species.particle_weight_mol),
      schedule_(make_consumption_schedule(cfg)),
      grid_(make_grid_spec(cfg.geometry, cfg.bins_x, cfg.bins_y)),
      sigma_m_(std::sqrt(2.0 * cfg.species.diffusion_m2ps * cfg.time_step_s)),
      initial_content_mol_(cfg.species.concentration_molpm3 *
                           cfg.droplet.volume_m3) {
  consumed_grid_.assign(grid_.size(), 0);
  inside_mask_ = grid_inside_mask(grid_, cfg.geometry.radius_m);
  state_.reservoir_mol = initial_content_mol_;
}

void Engine::move_range(std::size_t lo, std::size_t hi, double p_abs,
                        std::vector<Removal>& out) const {
  const std::uint64_t step = state_.step_index;
  const std::uint64_t seed = cfg_.rng_seed;
  const double sigma = sigma_m_;
  auto& particles = particles_scratch_;
  for (std::size_t i = lo; i < hi; ++i) {
    Particle& p = particles[i];
    CounterStream g(seed, p.id, step);
    const double dx = sigma * g.normal();
    const double dy = sigma * g.normal();
    const double dz = sigma * g.normal();
    if (!opt_.walls_enabled) {
      p.x_m += dx;
      p.y_m += dy;
      p.z_m += dz;
      continue;
    }
    const StepResolution res =
        resolve_step(cfg_.geometry, p.x_m, p.y_m, p.z_m, p.x_m + dx, p.y_m + dy,
                     p.z_m + dz, [&](double, double) {
                       return p_abs > 0.0 && g.uniform01() < p_abs;
                     });
    if (!res.settled)
      throw std::runtime_error(
          "particle step failed to settle inside the plate after " +
          std::to_string(kMaxMirrors) + " mirrors; the time step is too large");
    if (res.consumed) {
      out.push_back({i, res.cross_x_m, res.cross_y_m});
    } else {
      p.x_m = res.x_m;
      p.y_m = res.y_m;
      p.z_m = res.z_m;
    }
  }
}

void Engine::step() {
  const double t = cfg_.time_step_s * static_cast<double>(state_.step_index);
  const double dt = cfg_.time_step_s;
  const double rate_now = consumption_rate_at(schedule_, t);
  const double p_abs =
      absorption_probability(rate_now, cfg_.species.diffusion_m2ps, dt);

  CounterStream release_rng(cfg_.rng_seed, kReleaseStreamId, state_.step_index);
  const ReleaseBatch batch = sampler_.sample_release_batch(t, dt, release_rng);
  state_.particles.reserve(state_.particles.size() + batch.count());
  for (const ReleasePosition& rp : batch.positions)
    state_.particles.push_back({rp.x_m, rp.y_m, 0.0, next_particle_id_++});
  state_.released_count += batch.count();
  state_.reservoir_mol =
      initial_content_mol_ - static_cast<double>(state_.released_count) *
                                 cfg_.species.particle_weight_mol;

  const std::size_t n = state_.particles.size();
  particles_scratch_.swap(state_.particles);

  const unsigned workers = effective_workers(opt_.workers);
  std::vector<std::vector<Removal>> removals;
  if (workers <= 1 || n < kParallelThreshold) {
    removals.resize(1);
    move_range(0, n, p_abs, removals[0]);
  } else {
    removals.resize(workers);
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) {
      const std::size_t lo = std::min(n, w * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      pool.emplace_back([this, lo, hi, p_abs, &removals, &errors, w] {
        try {
          move_range(lo, hi, p_abs, removals[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    try {
      move_range(0, std::min(n, chunk), p_abs, removals[0]);
    } catch (...) {
      errors[0] = std::current_exception();
    }
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Merge in ascending particle order: chunks are contiguous and each scans
  // upward, so the result is identical for every worker count.
  const double t_end = dt * static_cast<double>(state_.step_index + 1);
  state_.particles.clear();
  state_.particles.reserve(n);
  std::size_t chunk_idx = 0;
  std::size_t event_idx = 0;
  std::size_t removed = 0;
  auto advance_removal = [&]() -> const Removal* {
    while (chunk_idx < removals.size()) {
      if (event_idx < removals[chunk_idx].size())
        return &removals[chunk_idx][event_idx];
      ++chunk_idx;
      event_idx = 0;
    }
    return nullptr;
  };
  const Removal* next_removal = advance_removal();
  for (std::size_t i = 0; i < n; ++i) {
    if (next_removal != nullptr && next_removal->index == i) {
      state_.consumed_ledger.push_back(
          {t_end, next_removal->x_m, next_removal->y_m});
      ++consumed_grid_[grid_.bin_of(next_removal->x_m, next_removal->y_m)];
      ++removed;
      ++event_idx;
      next_removal = advance_removal();
    } else {
      state_.particles.push_back(particles_scratch_[i]);
    }
  }
  state_.consumed_count += removed;
  state_.step_index += 1;
  state_.time_s = t_end;
}

Snapshot Engine::take_snapshot() const {
  Snapshot s = bin_snapshot(state_.particles, cfg_.geometry, cfg_.bins_x,
                            cfg_.bins_y);
  s.time_s = state_.time_s;
  s.consumed.assign(consumed_grid_.begin(), consumed_grid_.end());
  return s;
}

std::uint64_t resolved_step_count(const SimulationConfig& cfg) {
  if (!(cfg.end_time_s > 0.0)) return 0;
  return static_cast<std::uint64_t>(
      std::ceil(cfg.end_time_s / cfg.time_step_s - 1e-9));
}

std::vector<std::uint64_t> snapshot_step_indices(const SimulationConfig& cfg) {
  const std::uint64_t steps = resolved_step_count(cfg);
  std::vector<std::uint64_t> idx;
  idx.reserve(cfg.snapshot_times_s.size());
  for (double t : cfg.snapshot_times_s) {
    const double f = t / cfg.time_step_s;
    const std::uint64_t k =
        f <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(f));
    idx.push_back(std::min(k, steps));
  }
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

RunResult run_simulation(const SimulationConfig& cfg, EngineOptions opt) {
  Engine engine(cfg, opt);
  RunResult out;
  out.step_s = cfg.time_step_s;
  out.step_count = resolved_step_count(cfg);
  const std::vector<std::uint64_t> snaps = snapshot_step_indices(cfg);
  std::size_t next_snap = 0;

  auto series_row = [&]() {
    const SimState& s = engine.state();
    return TimeSeriesRow{s.time_s, s.released_count, s.particles.size(),
                         s.consumed_count};
  };

  out.series.rows.push_back(series_row());
  if (next_snap < snaps.size() && snaps[next_snap] == 0) {
    out.snapshots.push_back(engine.take_snapshot());
    ++next_snap;
  }
  for (std::uint64_t k = 0; k < out.step_count; ++k) {
    engine.step();
    if ((k + 1) % cfg.timeseries_stride == 0 || k + 1 == out.step_count)
      out.series.rows.push_back(series_row());
    if (next_snap < snaps.size() && snaps[next_snap] == k + 1) {
      out.snapshots.push_back(engine.take_snapshot());
      ++next_snap;
    }
  }
  out.final_state = engine.release_state();
  return out;
}

}  // namespace soaksim
