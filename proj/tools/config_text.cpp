#include "config_text.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "manifest.hpp"
#include "table_io.hpp"

namespace soaksim::cli {

namespace {

[[noreturn]] void bad(std::size_t line_no, const std::string& what) {
  std::ostringstream msg;
  msg << "config line " << line_no << ": " << what;
  throw std::invalid_argument(msg.str());
}

std::vector<double> parse_time_list(const std::string& value,
                                    std::size_t line_no) {
  std::vector<double> out;
  for (const std::string& piece : split(value, ',')) {
    const std::string t = trim(piece);
    if (t.empty()) bad(line_no, "empty entry in time list");
    out.push_back(parse_double(t));
  }
  return out;
}

void parse_bins(const std::string& value, std::size_t line_no,
                std::uint32_t& nx, std::uint32_t& ny) {
  const std::size_t x = value.find('x');
  if (x == std::string::npos)
    bad(line_no, "histogram_bins must look like 64x64");
  try {
    nx = static_cast<std::uint32_t>(parse_u64(trim(value.substr(0, x))));
    ny = static_cast<std::uint32_t>(parse_u64(trim(value.substr(x + 1))));
  } catch (const std::invalid_argument& e) {
    bad(line_no, e.what());
  }
}

}  // namespace

void apply_config_text(const std::string& text, SimulationConfig& cfg) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) bad(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) bad(line_no, "empty key");
    if (value.empty()) bad(line_no, "empty value for '" + key + "'");
    try {
      if (key == "plate_radius_m") {
        cfg.geometry.radius_m = parse_double(value);
      } else if (key == "agar_depth_m") {
        cfg.geometry.depth_m = parse_double(value);
      } else if (key == "diffusion_m2ps") {
        cfg.species.diffusion_m2ps = parse_double(value);
      } else if (key == "droplet_concentration") {
        const std::vector<std::string> tok = split(value, ' ');
        if (tok.size() != 2)
          bad(line_no,
              "droplet_concentration needs a value and a unit, e.g. '0.1 M'");
        cfg.species.concentration_molpm3 =
            concentration_to_si(parse_double(tok[0]), tok[1]);
      } else if (key == "particle_weight_mol") {
        cfg.species.particle_weight_mol = parse_double(value);
      } else if (key == "droplet_volume_m3") {
        cfg.droplet.volume_m3 = parse_double(value);
      } else if (key == "droplet_radius_m") {
        cfg.droplet.radius_m = parse_double(value);
      } else if (key == "droplet_center_x_m") {
        cfg.droplet.center_x_m = parse_double(value);
      } else if (key == "droplet_center_y_m") {
        cfg.droplet.center_y_m = parse_double(value);
      } else if (key == "soaking_rate_mps") {
        cfg.droplet.soaking_rate_mps = parse_double(value);
      } else if (key == "growth_initial_rate_mps") {
        cfg.growth.initial_rate_mps = parse_double(value);
      } else if (key == "growth_doubling_period_s") {
        cfg.growth.doubling_period_s = parse_double(value);
      } else if (key == "growth_rate_cap_mps") {
        if (value == "auto")
          cfg.growth.rate_cap_mps = 0.0;
        else if (value == "none")
          cfg.growth.rate_cap_mps = std::numeric_limits<double>::infinity();
        else
          cfg.growth.rate_cap_mps = parse_double(value);
      } else if (key == "time_step_s") {
        cfg.time_step_s = parse_double(value);
      } else if (key == "end_time_s") {
        cfg.end_time_s = parse_double(value);
      } else if (key == "snapshot_times_s") {
        if (value == "none")
          cfg.snapshot_times_s.clear();
        else
          cfg.snapshot_times_s = parse_time_list(value, line_no);
      } else if (key == "histogram_bins") {
        parse_bins(value, line_no, cfg.bins_x, cfg.bins_y);
      } else if (key == "timeseries_stride") {
        cfg.timeseries_stride = parse_u64(value);
      } else if (key == "rng_seed") {
        cfg.rng_seed = parse_u64(value);
      } else {
        bad(line_no, "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      if (what.rfind("config line", 0) == 0) throw;
      bad(line_no, what);
    }
  }
}

SimulationConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  SimulationConfig cfg = default_config();
  // A manifest embeds its run's config; accept it directly.
  if (text.rfind("soaksim_manifest 1", 0) == 0) {
    const Manifest m = parse_manifest(text);
    text = m.config_text;
  }
  try {
    apply_config_text(text, cfg);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  return cfg;
}

std::string render_config_text(const SimulationConfig& cfg) {
  std::string out;
  auto kv = [&out](const char* key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  kv("plate_radius_m", format_double(cfg.geometry.radius_m));
  kv("agar_depth_m", format_double(cfg.geometry.depth_m));
  kv("diffusion_m2ps", format_double(cfg.species.diffusion_m2ps));
  kv("droplet_concentration",
     format_double(cfg.species.concentration_molpm3) + " mol/m3");
  kv("particle_weight_mol", format_double(cfg.species.particle_weight_mol));
  kv("droplet_volume_m3", format_double(cfg.droplet.volume_m3));
  kv("droplet_radius_m", format_double(cfg.droplet.radius_m));
  kv("droplet_center_x_m", format_double(cfg.droplet.center_x_m));
  kv("droplet_center_y_m", format_double(cfg.droplet.center_y_m));
  kv("soaking_rate_mps", format_double(cfg.droplet.soaking_rate_mps));
  kv("growth_initial_rate_mps", format_double(cfg.growth.initial_rate_mps));
  kv("growth_doubling_period_s", format_double(cfg.growth.doubling_period_s));
  if (cfg.growth.rate_cap_mps == 0.0)
    kv("growth_rate_cap_mps", "auto");
  else if (cfg.growth.rate_cap_mps == std::numeric_limits<double>::infinity())
    kv("growth_rate_cap_mps", "none");
  else
    kv("growth_rate_cap_mps", format_double(cfg.growth.rate_cap_mps));
  kv("time_step_s", format_double(cfg.time_step_s));
  kv("end_time_s", format_double(cfg.end_time_s));
  if (cfg.snapshot_times_s.empty()) {
    kv("snapshot_times_s", "none");
  } else {
    std::string times;
    for (std::size_t i = 0; i < cfg.snapshot_times_s.size(); ++i) {
      if (i) times += ',';
      times += format_double(cfg.snapshot_times_s[i]);
    }
    kv("snapshot_times_s", times);
  }
  kv("histogram_bins",
     std::to_string(cfg.bins_x) + "x" + std::to_string(cfg.bins_y));
  kv("timeseries_stride", std::to_string(cfg.timeseries_stride));
  kv("rng_seed", std::to_string(cfg.rng_seed));
  return out;
}

}  // namespace soaksim::cli
