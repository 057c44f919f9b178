#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "soaksim/droplet.hpp"
#include "soaksim/growth.hpp"
#include "soaksim/model.hpp"
#include "soaksim/rng.hpp"

namespace soaksim {

// Particle-based stochastic engine. Each step: the droplet injects a release
// batch at the surface, every particle takes an independent Gaussian step
// with per-axis deviation sqrt(2 D dt), walls mirror, and surface crossings
// are consumed with the schedule's absorption probability.

struct Particle {
  double x_m;
  double y_m;
  double z_m;
  std::uint64_t id;  // substream id, stable for the particle's lifetime
};

struct ConsumptionEvent {
  double time_s;
  double x_m;  // surface crossing point
  double y_m;
};

// Square histogram over the plate's bounding box, row-major iy * nx + ix.
struct GridSpec {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double x0_m = 0.0;
  double x1_m = 0.0;
  double y0_m = 0.0;
  double y1_m = 0.0;

  std::size_t size() const noexcept {
    return static_cast<std::size_t>(nx) * ny;
  }
  std::size_t bin_of(double x_m, double y_m) const noexcept {
    auto clamp_idx = [](double f, std::uint32_t n) {
      if (!(f > 0.0)) return std::uint32_t{0};
      if (f >= static_cast<double>(n)) return n - 1;
      return static_cast<std::uint32_t>(f);
    };
    const std::uint32_t ix =
        clamp_idx((x_m - x0_m) / (x1_m - x0_m) * nx, nx);
    const std::uint32_t iy =
        clamp_idx((y_m - y0_m) / (y1_m - y0_m) * ny, ny);
    return static_cast<std::size_t>(iy) * nx + ix;
  }
  double bin_area_m2() const noexcept {
    return (x1_m - x0_m) / nx * ((y1_m - y0_m) / ny);
  }
};

GridSpec make_grid_spec(const PlateGeometry& geom, std::uint32_t nx, std::uint32_t ny);

// 1 where the bin rectangle intersects the plate disk, 0 where it lies wholly
// outside (distinct from a zero count inside the plate).
std::vector<std::uint8_t> grid_inside_mask(const GridSpec& grid, double plate_radius_m);

struct Snapshot {
  double time_s = 0.0;
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double x0_m = 0.0;
  double x1_m = 0.0;
  double y0_m = 0.0;
  double y1_m = 0.0;
  std::vector<std::int64_t> in_agar;   // particles currently diffusing
  std::vector<std::int64_t> consumed;  // cumulative consumption per bin
  std::vector<std::uint8_t> inside;
};

struct TimeSeriesRow {
  double time_s;
  std::uint64_t released;
  std::uint64_t in_agar;
  std::uint64_t consumed;
};

struct TimeSeries {
  std::vector<TimeSeriesRow> rows;
};

struct SimState {
  double time_s = 0.0;
  std::uint64_t step_index = 0;
  std::vector<Particle> particles;
  double reservoir_mol = 0.0;  // droplet content not yet released
  std::uint64_t released_count = 0;
  std::uint64_t consumed_count = 0;
  std::vector<ConsumptionEvent> consumed_ledger;  // time-ordered
};

inline constexpr int kMaxMirrors = 64;

struct StepResolution {
  double x_m;
  double y_m;
  double z_m;
  bool consumed;
  double cross_x_m;
  double cross_y_m;
  bool settled;
};

// Applies the wall rules to a straight step from (x0, y0, z0) to the trial
// end point: a surface crossing hands the interpolated crossing point to
// `surface` (returning true consumes the particle, otherwise the step
// mirrors), the bottom mirrors at z = depth, the rim mirrors the radius at a
// fixed angle. Gives up after kMaxMirrors corrections.
template <class SurfaceFn>
StepResolution resolve_step(const PlateGeometry& g, double x0, double y0,
                            double z0, double x1, double y1, double z1,
                            SurfaceFn&& surface) {
  StepResolution res{x1, y1, z1, false, 0.0, 0.0, true};
  const double rp2 = g.radius_m * g.radius_m;
  for (int i = 0; i < kMaxMirrors; ++i) {
    if (res.z_m < 0.0) {
      const double f = z0 / (z0 - res.z_m);  // z0 >= 0 > z, so f is in [0, 1]
      const double cx = x0 + f * (res.x_m - x0);
      const double cy = y0 + f * (res.y_m - y0);
      if (surface(cx, cy)) {
        res.consumed = true;
        res.cross_x_m = cx;
        res.cross_y_m = cy;
        return res;
      }
      res.z_m = -res.z_m;
      continue;
    }
    if (res.z_m > g.depth_m) {
      res.z_m = 2.0 * g.depth_m - res.z_m;
      continue;
    }
    const double r2 = res.x_m * res.x_m + res.y_m * res.y_m;
    if (r2 > rp2) {
      const double r = std::sqrt(r2);
      const double s = (2.0 * g.radius_m - r) / r;  // mirror radius, angle kept
      res.x_m *= s;
      res.y_m *= s;
      continue;
    }
    return res;
  }
  res.settled = false;
  return res;
}

// Pure mirror correction with the surface treated as reflecting.
inline StepResolution reflect_cylinder(const PlateGeometry& g, double x0,
                                       double y0, double z0, double x1,
                                       double y1, double z1) {
  return resolve_step(g, x0, y0, z0, x1, y1, z1,
                      [](double, double) { return false; });
}

// Histogram of particle positions; counts sum to particles.size() because
// alive particles always lie inside the plate cylinder.
Snapshot bin_snapshot(const std::vector<Particle>& particles,
                      const PlateGeometry& geom, std::uint32_t nx,
                      std::uint32_t ny);

struct EngineOptions {
  unsigned workers = 0;       // 0: one thread per hardware core
  bool walls_enabled = true;  // test-harness switch for free-space stepping
};

class Engine {
 public:
  explicit Engine(const SimulationConfig& cfg, EngineOptions opt = {});

  // Advances one time step: release, Gaussian flight, walls, consumption.
  // Throws std::domain_error when the absorption probability exceeds 1 and
  // std::runtime_error when a step cannot be mirrored back into the plate.
  void step();

  Snapshot take_snapshot() const;

  const SimState& state() const noexcept { return state_; }
  const SimulationConfig& config() const noexcept { return cfg_; }
  const SoakingModel& soaking_model() const noexcept { return model_; }
  const ConsumptionSchedule& schedule() const noexcept { return schedule_; }

  SimState release_state() noexcept { return std::move(state_); }

 private:
  struct Removal {
    std::size_t index;
    double x_m;
    double y_m;
  };

  void move_range(std::size_t lo, std::size_t hi, double p_abs,
                  std::vector<Removal>& out) const;

  SimulationConfig cfg_;
  EngineOptions opt_;
  SoakingModel model_;
  ReleaseSampler sampler_;
  ConsumptionSchedule schedule_;
  GridSpec grid_;
  double sigma_m_;
  double initial_content_mol_;
  std::uint64_t next_particle_id_ = 0;
  std::vector<std::int64_t> consumed_grid_;
  std::vector<std::uint8_t> inside_mask_;
  mutable std::vector<Particle> particles_scratch_;
  SimState state_;
};

struct RunResult {
  std::vector<Snapshot> snapshots;  // at the snapped snapshot times, ascending
  TimeSeries series;
  SimState final_state;
  std::uint64_t step_count = 0;
  double step_s = 0.0;
};

// Number of whole steps covering [0, end_time_s].
std::uint64_t resolved_step_count(const SimulationConfig& cfg);

// Snapshot times snapped to the nearest step boundary, sorted and deduplicated.
std::vector<std::uint64_t> snapshot_step_indices(const SimulationConfig& cfg);

// Drives Engine over the whole run: a time-series row at t = 0, every
// `timeseries_stride` steps and at the end, plus snapshots at the snapped
// times. Assumes cfg passed validate_config.
RunResult run_simulation(const SimulationConfig& cfg, EngineOptions opt = {});

}  // namespace soaksim
