#include "soaksim/model.hpp"

#include <cmath>
#include <stdexcept>

#include "soaksim/growth.hpp"

namespace soaksim {

namespace {

bool pos_finite(double v) { return std::isfinite(v) && v > 0.0; }

void require(std::vector<ValidationIssue>& out, bool ok, const char* field,
             const char* message) {
  if (!ok) out.push_back({field, message});
}

}  // namespace

double concentration_to_si(double value, const std::string& unit) {
  if (!pos_finite(value))
    throw std::invalid_argument("concentration must be positive and finite");
  if (unit == "M" || unit == "molar") return value * 1000.0;
  if (unit == "mol/m3") return value;
  throw std::invalid_argument("unknown concentration unit '" + unit +
                              "' (use M or mol/m3)");
}

SimulationConfig default_config() { return SimulationConfig{}; }

double resolved_rate_cap(const SimulationConfig& cfg) {
  if (cfg.growth.rate_cap_mps > 0.0) return cfg.growth.rate_cap_mps;
  return max_stable_rate(cfg.species.diffusion_m2ps, cfg.time_step_s);
}

double max_schedule_rate(const SimulationConfig& cfg) {
  const GrowthParams& g = cfg.growth;
  if (!(g.initial_rate_mps > 0.0)) return 0.0;
  double doublings = 0.0;
  if (g.doubling_period_s > 0.0 && cfg.end_time_s > 0.0)
    doublings = std::floor(cfg.end_time_s / g.doubling_period_s);
  const double uncapped = g.initial_rate_mps * std::exp2(doublings);
  return std::min(uncapped, resolved_rate_cap(cfg));
}

ValidationReport validate_config(const SimulationConfig& cfg) {
  ValidationReport rep;
  auto& v = rep.violations;

  require(v, pos_finite(cfg.geometry.radius_m), "plate_radius_m",
          "must be positive");
  require(v, pos_finite(cfg.geometry.depth_m), "agar_depth_m",
          "must be positive");

  require(v, pos_finite(cfg.species.diffusion_m2ps), "diffusion_m2ps",
          "must be positive");
  require(v, pos_finite(cfg.species.concentration_molpm3),
          "droplet_concentration", "must be positive");
  require(v, pos_finite(cfg.species.particle_weight_mol), "particle_weight_mol",
          "must be positive");

  require(v, pos_finite(cfg.droplet.volume_m3), "droplet_volume_m3",
          "must be positive");
  require(v, pos_finite(cfg.droplet.radius_m), "droplet_radius_m",
          "must be positive");
  require(v,
          std::isfinite(cfg.droplet.soaking_rate_mps) &&
              cfg.droplet.soaking_rate_mps >= 0.0,
          "soaking_rate_mps", "must be >= 0 (0 disables release)");
  if (pos_finite(cfg.droplet.radius_m) && pos_finite(cfg.geometry.radius_m)) {
    require(v, cfg.droplet.radius_m <= cfg.geometry.radius_m,
            "droplet_radius_m", "droplet footprint wider than the plate");
    const double off =
        std::hypot(cfg.droplet.center_x_m, cfg.droplet.center_y_m);
    require(v,
            std::isfinite(off) && off + cfg.droplet.radius_m <=
                                      cfg.geometry.radius_m * (1.0 + 1e-12),
            "droplet_center",
            "droplet footprint extends beyond the plate rim");
  }

  require(v,
          std::isfinite(cfg.growth.initial_rate_mps) &&
              cfg.growth.initial_rate_mps >= 0.0,
          "growth_initial_rate_mps", "required; set it explicitly (>= 0)");
  require(v, pos_finite(cfg.growth.doubling_period_s),
          "growth_doubling_period_s", "must be positive");
  require(v, !std::isnan(cfg.growth.rate_cap_mps) && cfg.growth.rate_cap_mps >= 0.0,
          "growth_rate_cap_mps", "must be >= 0 (0 selects the stability cap)");
  if (cfg.growth.rate_cap_mps > 0.0 && cfg.growth.initial_rate_mps >= 0.0 &&
      cfg.growth.initial_rate_mps > cfg.growth.rate_cap_mps)
    v.push_back({"growth_rate_cap_mps", "cap below the initial rate"});

  require(v, pos_finite(cfg.time_step_s), "time_step_s", "must be positive");
  require(v, std::isfinite(cfg.end_time_s) && cfg.end_time_s >= 0.0,
          "end_time_s", "must be >= 0");
  if (pos_finite(cfg.time_step_s) && std::isfinite(cfg.end_time_s) &&
      cfg.end_time_s > 0.0)
    require(v, cfg.end_time_s >= cfg.time_step_s, "end_time_s",
            "shorter than one time step (use 0 for a zero-step run)");
  for (double s : cfg.snapshot_times_s) {
    if (!(std::isfinite(s) && s >= 0.0 && s <= cfg.end_time_s)) {
      v.push_back(
          {"snapshot_times_s", "snapshot times must lie inside [0, end_time_s]"});
      break;
    }
  }
  require(v, cfg.bins_x >= 1 && cfg.bins_y >= 1, "histogram_bins",
          "needs at least one bin per axis");
  require(v, cfg.timeseries_stride >= 1, "timeseries_stride", "must be >= 1");

  // The absorption probability must stay a probability over the whole run.
  if (rep.ok()) {
    const double kmax = max_schedule_rate(cfg);
    const double p = absorption_probability_unchecked(
        kmax, cfg.species.diffusion_m2ps, cfg.time_step_s);
    if (!(p <= 1.0))
      v.push_back({"time_step_s",
                   "one-step absorption probability exceeds 1 at the peak "
                   "consumption rate; shrink the step or cap the rate"});
  }
  return rep;
}

}  // namespace soaksim
