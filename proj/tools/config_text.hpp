#pragma once

#include <iosfwd>
#include <string>

#include "soaksim/model.hpp"

namespace soaksim::cli {

// Flat key/value configuration text: one `key = value` pair per line,
// `#` comments, blank lines ignored. Unknown keys are errors so typos
// cannot silently fall back to defaults.
//
// Keys:
//   plate_radius_m            agar_depth_m
//   diffusion_m2ps            droplet_concentration  (value plus unit tag)
//   particle_weight_mol       droplet_volume_m3
//   droplet_radius_m          droplet_center_x_m     droplet_center_y_m
//   soaking_rate_mps          growth_initial_rate_mps
//   growth_doubling_period_s  growth_rate_cap_mps    (number, `auto`, `none`)
//   time_step_s               end_time_s
//   snapshot_times_s          (comma-separated seconds, or `none`)
//   histogram_bins            (NXxNY, e.g. 64x64)
//   timeseries_stride         rng_seed

// Parses config text into cfg, overwriting only the keys present.
// Throws std::invalid_argument with the line number on any malformed line.
void apply_config_text(const std::string& text, SimulationConfig& cfg);

// Loads a config file on top of the defaults. Throws std::runtime_error
// when the file cannot be read.
SimulationConfig load_config_file(const std::string& path);

// Renders cfg in the same key/value format (concentration in mol/m3).
std::string render_config_text(const SimulationConfig& cfg);

}  // namespace soaksim::cli
