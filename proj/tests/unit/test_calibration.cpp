#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "soaksim/calibration.hpp"
#include "soaksim/droplet.hpp"
#include "soaksim/model.hpp"
#include "soaksim/rng.hpp"

using namespace soaksim;

namespace {

// Exact exponential-decay series for a droplet with the stock geometry
// (V0 = 1e-8 m^3, contact radius 0.01 m) and the given soaking rate.
AreaSeries synthetic_series(double rate_mps, int n, double t_end) {
  SimulationConfig cfg = default_config();
  cfg.droplet.soaking_rate_mps = rate_mps;
  const SoakingModel m = make_soaking_model(cfg);
  AreaSeries series;
  series.droplet_volume_m3 = cfg.droplet.volume_m3;
  series.label = "synthetic";
  for (int i = 0; i < n; ++i) {
    const double t = t_end * i / (n - 1);
    series.samples.push_back({t, area_at(m, t)});
  }
  return series;
}

constexpr double kH0 = 3.183098861838e-05;  // 1e-8 m^3 over a 0.01 m disk

}  // namespace

TEST_CASE("droplet height derivation validates its inputs") {
  CHECK(derive_h0(1e-8, std::numbers::pi * 1e-4) ==
        doctest::Approx(kH0).epsilon(1e-12));
  CHECK_THROWS_AS(derive_h0(0.0, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(derive_h0(1e-8, 0.0), std::invalid_argument);
}

TEST_CASE("noiseless series are recovered exactly by both estimators") {
  const double rates[] = {1.2e-7, 6.1e-8, 5.5e-9};
  std::vector<double> recovered;
  for (double rate : rates) {
    const double t_end = 2.0 * kH0 / rate;  // two soak time constants
    const AreaSeries series = synthetic_series(rate, 10, t_end);
    const double h0 = derive_h0(series.droplet_volume_m3,
                                series.samples.front().area_m2);
    const FitResult fit = fit_soaking_rate(series, h0);

    CHECK(fit.soaking_rate_mps == doctest::Approx(rate).epsilon(1e-12));
    CHECK(fit.two_point_rate_mps == doctest::Approx(rate).epsilon(1e-12));
    CHECK(fit.h0_m == doctest::Approx(kH0).epsilon(1e-12));
    CHECK(fit.initial_area_m2 ==
          doctest::Approx(std::numbers::pi * 1e-4).epsilon(1e-12));
    CHECK(fit.r_squared > 0.999999);
    CHECK(fit.flag == FitFlag::ok);
    REQUIRE(fit.log_residuals.size() == series.samples.size());
    for (double r : fit.log_residuals) CHECK(std::abs(r) < 1e-12);
    recovered.push_back(fit.soaking_rate_mps);
  }
  // Faster-soaking stocks stay ordered after recovery.
  CHECK(recovered[0] > recovered[1]);
  CHECK(recovered[1] > recovered[2]);
}

TEST_CASE("two samples make both estimators coincide") {
  const AreaSeries series = synthetic_series(6.1e-8, 2, 1200.0);
  const double h0 = derive_h0(series.droplet_volume_m3,
                              series.samples.front().area_m2);
  const FitResult fit = fit_soaking_rate(series, h0);
  CHECK(fit.soaking_rate_mps ==
        doctest::Approx(fit.two_point_rate_mps).epsilon(1e-12));
  CHECK(fit.soaking_rate_mps == doctest::Approx(6.1e-8).epsilon(1e-12));
}

TEST_CASE("degenerate series raise flags instead of lying") {
  SUBCASE("constant areas mean no soaking") {
    AreaSeries series;
    series.droplet_volume_m3 = 1e-8;
    for (int i = 0; i < 5; ++i)
      series.samples.push_back({i * 600.0, 3.14159e-4});
    const FitResult fit = fit_soaking_rate(series, kH0);
    CHECK(fit.soaking_rate_mps == 0.0);
    CHECK(fit.flag == FitFlag::no_soaking);
  }
  SUBCASE("growing areas mean a negative rate") {
    AreaSeries series;
    series.droplet_volume_m3 = 1e-8;
    for (int i = 0; i < 5; ++i)
      series.samples.push_back({i * 600.0, 3.14159e-4 * (1.0 + 0.1 * i)});
    const FitResult fit = fit_soaking_rate(series, kH0);
    CHECK(fit.soaking_rate_mps < 0.0);
    CHECK(fit.flag == FitFlag::negative_rate);
  }
}

TEST_CASE("malformed series are rejected with the offending sample") {
  AreaSeries series;
  series.droplet_volume_m3 = 1e-8;
  series.samples = {{0.0, 3e-4}, {600.0, 2.5e-4}, {300.0, 2e-4}};
  CHECK_THROWS_WITH_AS(fit_soaking_rate(series, kH0),
                       doctest::Contains("sample 2"), std::invalid_argument);

  series.samples = {{0.0, 3e-4}, {600.0, -2.5e-4}};
  CHECK_THROWS_WITH_AS(fit_soaking_rate(series, kH0),
                       doctest::Contains("sample 1"), std::invalid_argument);

  series.samples = {{0.0, 3e-4}};
  CHECK_THROWS_AS(fit_soaking_rate(series, kH0), std::invalid_argument);
}

TEST_CASE("two-point estimator validates its inputs") {
  // Exact recovery on clean endpoints.
  SimulationConfig cfg = default_config();
  cfg.droplet.soaking_rate_mps = 5.5e-9;
  const SoakingModel m = make_soaking_model(cfg);
  const double k = two_point_estimate(m.height_m, 0.0, area_at(m, 0.0), 2400.0,
                                      area_at(m, 2400.0));
  CHECK(k == doctest::Approx(5.5e-9).epsilon(1e-12));

  CHECK_THROWS_AS(two_point_estimate(kH0, 100.0, 3e-4, 100.0, 2e-4),
                  std::invalid_argument);
  CHECK_THROWS_AS(two_point_estimate(kH0, 0.0, 0.0, 100.0, 2e-4),
                  std::invalid_argument);
}

TEST_CASE("noisy series stay within ten percent at the 95th percentile") {
  const double rate = 5.5e-9;  // slowest adopted rate: the hardest case
  const double t_end = 2.0 * kH0 / rate;
  const int trials = 100;
  const int samples = 10;

  std::vector<double> errors;
  for (int trial = 0; trial < trials; ++trial) {
    AreaSeries series = synthetic_series(rate, samples, t_end);
    CounterStream g(4242, static_cast<std::uint64_t>(trial), 0);
    for (AreaSample& s : series.samples)
      s.area_m2 *= 1.0 + 0.02 * g.normal();
    const double h0 = derive_h0(series.droplet_volume_m3,
                                series.samples.front().area_m2);
    const FitResult fit = fit_soaking_rate(series, h0);
    errors.push_back(std::abs(fit.soaking_rate_mps - rate) / rate);
  }
  std::sort(errors.begin(), errors.end());
  CHECK(errors[94] < 0.10);  // 95th percentile by nearest rank
}
