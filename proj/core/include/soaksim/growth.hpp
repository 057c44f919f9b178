#pragma once

#include "soaksim/model.hpp"

namespace soaksim {

// Surface consumption by the growing cell layer. The rate doubles stepwise at
// whole multiples of the doubling period until it hits the cap; a particle
// crossing the surface in one step is consumed with probability
// P = k * sqrt(pi * dt / D), the discrete counterpart of the Robin condition
// D dc/dz = k c at z = 0.

struct ConsumptionSchedule {
  double initial_rate_mps = 0.0;
  double doubling_period_s = 1200.0;
  double rate_cap_mps = 0.0;
};

// Resolves the config's cap (0 means auto) against the configured time step.
ConsumptionSchedule make_consumption_schedule(const SimulationConfig& cfg);

// k(t) = min(cap, k0 * 2^floor(t / period)); throws std::invalid_argument for
// t < 0. k0 == 0 disables consumption at every t.
double consumption_rate_at(const ConsumptionSchedule& s, double t_s);

// Largest rate whose one-step absorption probability stays at or below 1.
double max_stable_rate(double diffusion_m2ps, double dt_s);

// P = k * sqrt(pi * dt / D), unguarded.
double absorption_probability_unchecked(double rate_mps, double diffusion_m2ps,
                                        double dt_s);

// As above, but throws std::domain_error when P exceeds 1: the step is too
// coarse for the requested rate and must not be silently clamped.
double absorption_probability(double rate_mps, double diffusion_m2ps, double dt_s);

}  // namespace soaksim
