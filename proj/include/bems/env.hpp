#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bems/dataset.hpp"
#include "bems/reward.hpp"
#include "bems/rng.hpp"

namespace bems::env {

struct BatteryParams {
  double capacity_kwh = 6.4;
  double nominal_power_kw = 5.0;
  double charge_efficiency = 0.95;
  double discharge_efficiency = 0.95;

  void validate() const;
};

struct EnvParams {
  BatteryParams battery;
  double initial_soc_fraction = 0.5;  // in [0, 1]

  void validate() const;
};

struct DistrictState {
  int t = 0;                // timestep index 0..T-1
  std::vector<double> soc;  // per-building state of charge, kWh
};

struct StepResult {
  std::vector<double> observation;
  reward::StepSignals signals;
  bool done = false;
};

// Hourly district of B buildings with exogenous load/solar profiles and one
// controllable battery each. Observations are the normalized exogenous
// signals (cyclic hour/month, t_out, rh, price, carbon, setpoint) plus
// per-building SoC fractions: dimension 9 + B. A single instance is
// single-threaded; the dataset is immutable and shared across instances.
class DistrictEnv {
 public:
  DistrictEnv(std::shared_ptr<const Dataset> dataset, EnvParams params);

  std::vector<double> reset(std::uint64_t seed);

  // Per-building battery command in [-1, 1] (clipped on entry): positive
  // charges, negative discharges, as a fraction of nominal power. Charge
  // draw is limited by capacity headroom, discharge by available SoC;
  // efficiency applies on the way in and out.
  StepResult step(const std::vector<double>& action);

  int num_buildings() const { return dataset_->num_buildings; }
  int horizon() const { return dataset_->horizon(); }
  int observation_dim() const { return 9 + num_buildings(); }
  bool done() const { return state_.t >= horizon(); }
  int current_hour() const;
  const DistrictState& state() const { return state_; }
  const Dataset& dataset() const { return *dataset_; }
  const EnvParams& params() const { return params_; }

 private:
  std::vector<double> observation_at(int t) const;

  std::shared_ptr<const Dataset> dataset_;
  EnvParams params_;
  DistrictState state_;
  Rng rng_;
  bool started_ = false;
  // per-column min/max, frozen at construction
  double t_out_min_, t_out_max_, rh_min_, rh_max_;
  double price_min_, price_max_, carbon_min_, carbon_max_;
  double setpoint_min_, setpoint_max_;
};

}  // namespace bems::env
