#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soaksim {

// Parameter records for a droplet-on-agar release experiment. All quantities
// are SI (metres, seconds, moles, mol/m^3). The axial coordinate z runs
// downward from the agar surface: z = 0 where the droplet sits, z = depth_m
// at the dish bottom.

struct PlateGeometry {
  double radius_m = 0.1;
  double depth_m = 6.0e-3;
};

struct SpeciesParams {
  double diffusion_m2ps = 5.0e-11;       // isotropic diffusivity in agar
  double concentration_molpm3 = 100.0;   // droplet stock concentration
  double particle_weight_mol = 2.0e-13;  // moles carried by one simulated particle
};

struct DropletSpec {
  double volume_m3 = 1.0e-8;
  double radius_m = 0.01;            // initial contact radius
  double center_x_m = 0.0;           // contact-disk centre on the surface
  double center_y_m = 0.0;
  double soaking_rate_mps = 1.2e-7;  // K: volume flux into the agar per contact area
};

// Surface consumption rate k(t) = min(cap, k0 * 2^floor(t / period)).
struct GrowthParams {
  double initial_rate_mps = -1.0;    // k0; required input, negative means unset
  double doubling_period_s = 1200.0;
  double rate_cap_mps = 0.0;         // 0 selects the largest single-step-stable rate
};

struct SimulationConfig {
  PlateGeometry geometry;
  SpeciesParams species;
  DropletSpec droplet;
  GrowthParams growth;
  double time_step_s = 10.0;
  double end_time_s = 198000.0;
  std::vector<double> snapshot_times_s{0.0, 36000.0, 90000.0, 198000.0};
  std::uint32_t bins_x = 64;
  std::uint32_t bins_y = 64;
  std::uint32_t timeseries_stride = 1;
  std::uint64_t rng_seed = 1;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> violations;
  bool ok() const noexcept { return violations.empty(); }
};

// Pure whole-config check: collects every violation instead of throwing, and
// the same config always yields the same report. end_time_s == 0 is accepted
// as an explicit zero-step run.
ValidationReport validate_config(const SimulationConfig& cfg);

// Converts a tagged concentration to mol/m^3. "M" and "molar" mean mol/L and
// scale by 1000; "mol/m3" passes through. Throws std::invalid_argument for an
// unknown unit or a non-positive value.
double concentration_to_si(double value, const std::string& unit);

// Stock defaults: 0.1 M droplet paired with the fastest soaking rate. The
// growth rate k0 is deliberately left unset and must be supplied.
SimulationConfig default_config();

// Consumption-rate cap after resolving the auto setting (cap == 0) to the
// largest rate whose one-step absorption probability stays at or below 1.
double resolved_rate_cap(const SimulationConfig& cfg);

// Largest consumption rate the schedule can reach on [0, end_time_s] under
// the resolved cap.
double max_schedule_rate(const SimulationConfig& cfg);

}  // namespace soaksim
