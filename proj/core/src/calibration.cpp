#include "soaksim/calibration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace soaksim {

namespace {

void require_pos_finite(double v, const char* what) {
  if (!std::isfinite(v) || v <= 0.0) {
    std::ostringstream msg;
    msg << what << " must be positive and finite, got " << v;
    throw std::invalid_argument(msg.str());
  }
}

}  // namespace

double derive_h0(double volume_m3, double initial_area_m2) {
  require_pos_finite(volume_m3, "droplet volume");
  require_pos_finite(initial_area_m2, "initial contact area");
  return volume_m3 / initial_area_m2;
}

FitResult fit_soaking_rate(const AreaSeries& series, double h0_m) {
  require_pos_finite(h0_m, "initial droplet height");
  const std::size_t n = series.samples.size();
  if (n < 2)
    throw std::invalid_argument(
        "area fit needs at least two samples, got " + std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    const AreaSample& s = series.samples[i];
    std::ostringstream msg;
    if (!std::isfinite(s.time_s)) {
      msg << "sample " << i << " has a non-finite time " << s.time_s;
      throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(s.area_m2) || s.area_m2 <= 0.0) {
      msg << "sample " << i << " has a non-positive area " << s.area_m2;
      throw std::invalid_argument(msg.str());
    }
    if (i > 0 && !(s.time_s > series.samples[i - 1].time_s)) {
      msg << "sample " << i << " time " << s.time_s
          << " does not increase past " << series.samples[i - 1].time_s;
      throw std::invalid_argument(msg.str());
    }
  }

  double mean_t = 0.0;
  double mean_y = 0.0;
  for (const AreaSample& s : series.samples) {
    mean_t += s.time_s;
    mean_y += std::log(s.area_m2);
  }
  mean_t /= static_cast<double>(n);
  mean_y /= static_cast<double>(n);

  double s_tt = 0.0;
  double s_ty = 0.0;
  for (const AreaSample& s : series.samples) {
    const double dt = s.time_s - mean_t;
    const double dy = std::log(s.area_m2) - mean_y;
    s_tt += dt * dt;
    s_ty += dt * dy;
  }
  const double slope = s_ty / s_tt;  // s_tt > 0: times strictly increase
  const double intercept = mean_y - slope * mean_t;

  FitResult out;
  out.h0_m = h0_m;
  out.soaking_rate_mps = -slope * h0_m;
  out.initial_area_m2 = std::exp(intercept);
  out.two_point_rate_mps = two_point_estimate(
      h0_m, series.samples.front().time_s, series.samples.front().area_m2,
      series.samples.back().time_s, series.samples.back().area_m2);

  double ss_res = 0.0;
  double ss_tot = 0.0;
  out.log_residuals.reserve(n);
  for (const AreaSample& s : series.samples) {
    const double y = std::log(s.area_m2);
    const double r = y - (intercept + slope * s.time_s);
    out.log_residuals.push_back(r);
    ss_res += r * r;
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;

  if (out.soaking_rate_mps < 0.0)
    out.flag = FitFlag::negative_rate;
  else if (out.soaking_rate_mps == 0.0)
    out.flag = FitFlag::no_soaking;
  else
    out.flag = FitFlag::ok;
  return out;
}

double two_point_estimate(double h0_m, double t0_s, double a0_m2, double t1_s,
                          double a1_m2) {
  require_pos_finite(h0_m, "initial droplet height");
  require_pos_finite(a0_m2, "first contact area");
  require_pos_finite(a1_m2, "second contact area");
  if (!std::isfinite(t0_s) || !std::isfinite(t1_s) || t1_s == t0_s)
    throw std::invalid_argument(
        "two-point estimate needs two distinct, finite sample times");
  return h0_m * std::log(a0_m2 / a1_m2) / (t1_s - t0_s);
}

}  // namespace soaksim
