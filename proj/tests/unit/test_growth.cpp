#include <cmath>
#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "soaksim/growth.hpp"
#include "soaksim/model.hpp"

using namespace soaksim;

TEST_CASE("consumption rate doubles stepwise at whole periods") {
  ConsumptionSchedule s;
  s.initial_rate_mps = 3e-9;
  s.doubling_period_s = 1200.0;
  s.rate_cap_mps = std::numeric_limits<double>::infinity();

  // Powers of two scale doubles exactly, so these comparisons are bitwise.
  CHECK(consumption_rate_at(s, 0.0) == 3e-9);
  CHECK(consumption_rate_at(s, 1199.999) == 3e-9);
  CHECK(consumption_rate_at(s, 1200.0) == 6e-9);
  CHECK(consumption_rate_at(s, 1800.0) == 6e-9);
  CHECK(consumption_rate_at(s, 2399.999) == 6e-9);
  CHECK(consumption_rate_at(s, 2400.0) == 1.2e-8);
  CHECK(consumption_rate_at(s, 3600.0) == 2.4e-8);

  CHECK_THROWS_AS(consumption_rate_at(s, -1.0), std::invalid_argument);
}

TEST_CASE("the cap clamps the doubling schedule") {
  ConsumptionSchedule s;
  s.initial_rate_mps = 3e-9;
  s.doubling_period_s = 1200.0;
  s.rate_cap_mps = 7e-9;
  CHECK(consumption_rate_at(s, 0.0) == 3e-9);
  CHECK(consumption_rate_at(s, 1200.0) == 6e-9);
  CHECK(consumption_rate_at(s, 2400.0) == 7e-9);   // would be 1.2e-8
  CHECK(consumption_rate_at(s, 36000.0) == 7e-9);  // stays pinned
}

TEST_CASE("a zero initial rate disables consumption forever") {
  ConsumptionSchedule s;
  s.initial_rate_mps = 0.0;
  s.doubling_period_s = 1200.0;
  s.rate_cap_mps = std::numeric_limits<double>::infinity();
  CHECK(consumption_rate_at(s, 0.0) == 0.0);
  CHECK(consumption_rate_at(s, 1e6) == 0.0);
}

TEST_CASE("largest stable rate and absorption probability") {
  // Frozen: sqrt(D / (pi dt)) at D = 5e-11 m^2/s, dt = 10 s.
  CHECK(max_stable_rate(5e-11, 10.0) ==
        doctest::Approx(1.261566261010e-06).epsilon(1e-12));

  // Frozen: P = k sqrt(pi dt / D).
  CHECK(absorption_probability(1e-6, 5e-11, 0.1) ==
        doctest::Approx(7.926654595212e-02).epsilon(1e-12));

  // P > 1 must throw, never clamp; the unchecked variant reports the excess.
  CHECK(absorption_probability_unchecked(2e-7, 5e-11, 1000.0) ==
        doctest::Approx(1.585330919042e+00).epsilon(1e-12));
  CHECK_THROWS_AS(absorption_probability(2e-7, 5e-11, 1000.0),
                  std::domain_error);

  // The stable-rate bound sits exactly at P = 1.
  const double k = max_stable_rate(5e-11, 10.0);
  CHECK(absorption_probability_unchecked(k, 5e-11, 10.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(absorption_probability(0.0, 5e-11, 10.0) == 0.0);
}

TEST_CASE("schedule built from a config resolves the auto cap") {
  SimulationConfig cfg = default_config();
  cfg.growth.initial_rate_mps = 1e-8;
  cfg.growth.rate_cap_mps = 0.0;  // auto
  const ConsumptionSchedule s = make_consumption_schedule(cfg);
  CHECK(s.initial_rate_mps == 1e-8);
  CHECK(s.doubling_period_s == cfg.growth.doubling_period_s);
  CHECK(s.rate_cap_mps ==
        doctest::Approx(max_stable_rate(cfg.species.diffusion_m2ps,
                                        cfg.time_step_s))
            .epsilon(1e-15));

  cfg.growth.rate_cap_mps = 4e-8;
  CHECK(make_consumption_schedule(cfg).rate_cap_mps == 4e-8);
}
