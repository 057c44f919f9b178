#pragma once

#include <string>
#include <vector>

namespace soaksim {

// Soaking-rate recovery from measured contact-area time series. The area law
// A(t) = A0 exp(-K t / h0) makes ln A linear in t, so the least-squares slope
// of (t, ln A) gives K = -slope * h0.

struct AreaSample {
  double time_s;
  double area_m2;
};

struct AreaSeries {
  std::vector<AreaSample> samples;  // strictly increasing times, positive areas
  std::string label;
  double droplet_volume_m3 = 0.0;   // optional, for h0 derivation
};

enum class FitFlag { ok, no_soaking, negative_rate };

struct FitResult {
  double soaking_rate_mps = 0.0;    // least-squares K
  double two_point_rate_mps = 0.0;  // from the first and last samples
  double h0_m = 0.0;
  double initial_area_m2 = 0.0;     // exp(intercept)
  double r_squared = 0.0;
  std::vector<double> log_residuals;
  FitFlag flag = FitFlag::ok;
};

// h0 from droplet volume and the first measured area. Throws
// std::invalid_argument unless both are positive and finite.
double derive_h0(double volume_m3, double initial_area_m2);

// Log-linear least squares over the whole series. Throws
// std::invalid_argument for fewer than two samples, non-increasing times,
// non-positive areas, or non-finite inputs; messages name the offending row.
FitResult fit_soaking_rate(const AreaSeries& series, double h0_m);

// K from two samples: K = h0 * ln(a0 / a1) / (t1 - t0). Throws
// std::invalid_argument when t1 == t0 or any input is degenerate.
double two_point_estimate(double h0_m, double t0_s, double a0_m2, double t1_s,
                          double a1_m2);

}  // namespace soaksim
