#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "soaksim/calibration.hpp"
#include "soaksim/continuum.hpp"
#include "soaksim/particles.hpp"

namespace soaksim::cli {

// Locale-independent scientific rendering with 12 fractional digits; every
// emitted number re-parses to the same value at that precision. Counts are
// written as plain integers.
std::string format_double(double v);
double parse_double(const std::string& s);
std::int64_t parse_i64(const std::string& s);
std::uint64_t parse_u64(const std::string& s);

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& line, char sep);

// Time series: header `time_s,released,in_agar,consumed`, one row per sample.
std::string render_timeseries_csv(const TimeSeries& ts);
TimeSeries parse_timeseries_csv(const std::string& text);

// Dense grid block: 3-line header (`# time_s ...`, `# grid ...`,
// `# quantity ...`) followed by one CSV line per grid row. Plate histograms
// use `# grid nx ny x0 x1 y0 y1` with row-major (iy) rows and `nan` in bins
// outside the plate disk; cylinder fields use `# grid nr nz dr dz`.
std::string render_count_grid_csv(const Snapshot& snap, bool consumed_quantity);
std::string render_field_csv(const Field& f);

struct CountGrid {
  double time_s = 0.0;
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  double x0_m = 0.0;
  double x1_m = 0.0;
  double y0_m = 0.0;
  double y1_m = 0.0;
  std::string quantity;
  std::vector<std::int64_t> values;  // masked cells read back as 0
};
CountGrid parse_count_grid_csv(const std::string& text);
Field parse_field_csv(const std::string& text);

// Reference-solver series: mol bookkeeping per internal step.
std::string render_solver_series_csv(const std::vector<SolverSeriesRow>& rows);
std::vector<SolverSeriesRow> parse_solver_series_csv(const std::string& text);

// Cumulative surface consumption by radial ring.
std::string render_consumed_rings_csv(const std::vector<double>& ring_mol,
                                      double ring_w_m);

// Consumption event ledger: `time_s,x_m,y_m`, one row per consumed particle.
std::string render_ledger_csv(const std::vector<ConsumptionEvent>& events);

// Contact-area table: optional `# volume_m3 <v>` comment, optional
// `time_s,area_m2` header row, then time,area rows. Errors name the line.
AreaSeries parse_area_series_csv(const std::string& text,
                                 const std::string& label);

}  // namespace soaksim::cli
