#include "soaksim/droplet.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace soaksim {

namespace {

void require_time(double t_s) {
  if (!(t_s >= 0.0))
    throw std::invalid_argument("soaking model queried before t = 0");
}

}  // namespace

double initial_height(double volume_m3, double area_m2) {
  if (!(std::isfinite(volume_m3) && volume_m3 > 0.0))
    throw std::invalid_argument("droplet volume must be positive");
  if (!(std::isfinite(area_m2) && area_m2 > 0.0))
    throw std::invalid_argument("droplet contact area must be positive");
  const double h = volume_m3 / area_m2;
  if (!(std::isfinite(h) && h > 0.0))
    throw std::invalid_argument("degenerate droplet height");
  return h;
}

SoakingModel make_soaking_model(const SimulationConfig& cfg) {
  SoakingModel m;
  m.initial_volume_m3 = cfg.droplet.volume_m3;
  m.initial_radius_m = cfg.droplet.radius_m;
  m.initial_area_m2 =
      std::numbers::pi * cfg.droplet.radius_m * cfg.droplet.radius_m;
  m.height_m = initial_height(m.initial_volume_m3, m.initial_area_m2);
  m.soaking_rate_mps = cfg.droplet.soaking_rate_mps;
  m.concentration_molpm3 = cfg.species.concentration_molpm3;
  m.center_x_m = cfg.droplet.center_x_m;
  m.center_y_m = cfg.droplet.center_y_m;
  return m;
}

double area_at(const SoakingModel& m, double t_s) {
  require_time(t_s);
  return m.initial_area_m2 * std::exp(-m.soaking_rate_mps * t_s / m.height_m);
}

double radius_at(const SoakingModel& m, double t_s) {
  require_time(t_s);
  return m.initial_radius_m *
         std::exp(-m.soaking_rate_mps * t_s / (2.0 * m.height_m));
}

double volume_at(const SoakingModel& m, double t_s) {
  return area_at(m, t_s) * m.height_m;
}

double release_rate(const SoakingModel& m, double t_s) {
  return m.concentration_molpm3 * m.soaking_rate_mps * area_at(m, t_s);
}

double cumulative_release(const SoakingModel& m, double t_s) {
  require_time(t_s);
  const double x = m.soaking_rate_mps * t_s / m.height_m;
  return m.concentration_molpm3 * m.initial_volume_m3 * (-std::expm1(-x));
}

ReleaseSampler::ReleaseSampler(const SoakingModel& model,
                               double particle_weight_mol)
    : model_(model), weight_mol_(particle_weight_mol) {
  if (!(std::isfinite(particle_weight_mol) && particle_weight_mol > 0.0))
    throw std::invalid_argument("particle weight must be positive");
  const double total =
      model.concentration_molpm3 * model.initial_volume_m3 / particle_weight_mol;
  // Nudged down so FP noise on an exact-integer total cannot add a particle.
  budget_ = static_cast<std::uint64_t>(std::ceil(total * (1.0 - 1e-12)));
}

ReleaseBatch ReleaseSampler::sample_release_batch(double t_s, double dt_s,
                                                  CounterStream& rng) {
  require_time(t_s);
  if (!(dt_s > 0.0)) throw std::invalid_argument("batch interval must be positive");

  ReleaseBatch batch;
  batch.time_s = t_s;
  batch.particle_weight_mol = weight_mol_;

  const double lo = cumulative_release(model_, t_s);
  const double hi = cumulative_release(model_, t_s + dt_s);
  double expected = std::max(0.0, (hi - lo) / weight_mol_);
  const double remaining = static_cast<double>(budget_ - released_);
  if (expected > remaining) expected = remaining;

  const double base = std::floor(expected);
  const double frac = expected - base;
  std::uint64_t n = static_cast<std::uint64_t>(base);
  if (rng.uniform01() < frac) ++n;

  batch.positions.resize(n);
  const double footprint_r = radius_at(model_, t_s);
  for (auto& p : batch.positions) {
    const double r = footprint_r * std::sqrt(rng.uniform01());
    const double a = 2.0 * std::numbers::pi * rng.uniform01();
    p.x_m = model_.center_x_m + r * std::cos(a);
    p.y_m = model_.center_y_m + r * std::sin(a);
  }
  released_ += n;
  return batch;
}

}  // namespace soaksim
