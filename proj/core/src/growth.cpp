#include "soaksim/growth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace soaksim {

ConsumptionSchedule make_consumption_schedule(const SimulationConfig& cfg) {
  ConsumptionSchedule s;
  s.initial_rate_mps = std::max(cfg.growth.initial_rate_mps, 0.0);
  s.doubling_period_s = cfg.growth.doubling_period_s;
  s.rate_cap_mps = resolved_rate_cap(cfg);
  return s;
}

double consumption_rate_at(const ConsumptionSchedule& s, double t_s) {
  if (!(t_s >= 0.0))
    throw std::invalid_argument("consumption rate queried before t = 0");
  if (!(s.initial_rate_mps > 0.0)) return 0.0;
  const double doublings = std::floor(t_s / s.doubling_period_s);
  const double rate = s.initial_rate_mps * std::exp2(doublings);
  return std::min(rate, s.rate_cap_mps);
}

double max_stable_rate(double diffusion_m2ps, double dt_s) {
  if (!(diffusion_m2ps > 0.0) || !(dt_s > 0.0))
    throw std::invalid_argument("stability cap needs positive D and dt");
  return std::sqrt(diffusion_m2ps / (std::numbers::pi * dt_s));
}

double absorption_probability_unchecked(double rate_mps, double diffusion_m2ps,
                                        double dt_s) {
  return rate_mps * std::sqrt(std::numbers::pi * dt_s / diffusion_m2ps);
}

double absorption_probability(double rate_mps, double diffusion_m2ps,
                              double dt_s) {
  if (!(rate_mps >= 0.0))
    throw std::invalid_argument("consumption rate must be >= 0");
  if (!(diffusion_m2ps > 0.0) || !(dt_s > 0.0))
    throw std::invalid_argument("absorption probability needs positive D and dt");
  const double p =
      absorption_probability_unchecked(rate_mps, diffusion_m2ps, dt_s);
  if (p > 1.0)
    throw std::domain_error(
        "one-step absorption probability " + std::to_string(p) +
        " exceeds 1; the time step is too coarse for this consumption rate");
  return p;
}

}  // namespace soaksim
