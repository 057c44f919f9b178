#pragma once

#include <cstdint>
#include <vector>

#include "soaksim/model.hpp"
#include "soaksim/rng.hpp"

namespace soaksim {

// Shrinking-droplet source. The droplet keeps its initial height h0 = V0/A0
// while its contact area decays exponentially, A(t) = A0 exp(-K t / h0), and
// the dissolved stock enters the agar at rate C * K * A(t).

struct SoakingModel {
  double initial_volume_m3 = 0.0;
  double initial_area_m2 = 0.0;
  double initial_radius_m = 0.0;
  double height_m = 0.0;              // V0 / A0, constant while soaking
  double soaking_rate_mps = 0.0;      // K
  double concentration_molpm3 = 0.0;  // stock concentration C
  double center_x_m = 0.0;
  double center_y_m = 0.0;
};

// Droplet height from volume and contact area. Throws std::invalid_argument
// unless both inputs are positive and finite.
double initial_height(double volume_m3, double area_m2);

SoakingModel make_soaking_model(const SimulationConfig& cfg);

// All t_s must be >= 0 (std::invalid_argument otherwise).
double area_at(const SoakingModel& m, double t_s);
double radius_at(const SoakingModel& m, double t_s);
double volume_at(const SoakingModel& m, double t_s);
double release_rate(const SoakingModel& m, double t_s);        // mol/s into the agar
double cumulative_release(const SoakingModel& m, double t_s);  // mol released on [0, t]

struct ReleasePosition {
  double x_m;
  double y_m;
};

struct ReleaseBatch {
  double time_s = 0.0;  // start of the interval the batch covers
  double particle_weight_mol = 0.0;
  std::vector<ReleasePosition> positions;  // i.i.d. uniform over the footprint
  std::uint64_t count() const noexcept { return positions.size(); }
  double moles() const noexcept {
    return static_cast<double>(count()) * particle_weight_mol;
  }
};

// Draws release batches for consecutive steps. Each count stochastically
// rounds the exact interval integral of the release rate; the running total
// never exceeds ceil(C * V0 / w) particles.
class ReleaseSampler {
 public:
  ReleaseSampler(const SoakingModel& model, double particle_weight_mol);

  ReleaseBatch sample_release_batch(double t_s, double dt_s, CounterStream& rng);

  std::uint64_t released() const noexcept { return released_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  SoakingModel model_;
  double weight_mol_;
  std::uint64_t budget_;
  std::uint64_t released_ = 0;
};

}  // namespace soaksim
