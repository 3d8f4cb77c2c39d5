#include "bems/env.hpp"

#include <algorithm>
#include <cmath>

#include "bems/errors.hpp"

namespace bems::env {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

std::pair<double, double> min_max(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return {*lo, *hi};
}
}  // namespace

void BatteryParams::validate() const {
  if (!(capacity_kwh > 0.0)) throw ConfigError("battery capacity must be > 0");
  if (!(nominal_power_kw > 0.0)) throw ConfigError("nominal power must be > 0");
  for (double e : {charge_efficiency, discharge_efficiency}) {
    if (!(e > 0.0) || e > 1.0) throw ConfigError("efficiency must be in (0, 1]");
  }
}

void EnvParams::validate() const {
  battery.validate();
  if (!(initial_soc_fraction >= 0.0 && initial_soc_fraction <= 1.0)) {
    throw ConfigError("initial_soc_fraction must be in [0, 1]");
  }
}

DistrictEnv::DistrictEnv(std::shared_ptr<const Dataset> dataset,
                         EnvParams params)
    : dataset_(std::move(dataset)), params_(params), rng_(0) {
  if (!dataset_) throw UsageError("null dataset");
  dataset_->validate();
  params_.validate();
  std::tie(t_out_min_, t_out_max_) = min_max(dataset_->t_out);
  std::tie(rh_min_, rh_max_) = min_max(dataset_->rh);
  std::tie(price_min_, price_max_) = min_max(dataset_->price);
  std::tie(carbon_min_, carbon_max_) = min_max(dataset_->carbon);
  std::tie(setpoint_min_, setpoint_max_) = min_max(dataset_->setpoint);
  state_.soc.assign(num_buildings(), 0.0);
}

std::vector<double> DistrictEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  state_.t = 0;
  state_.soc.assign(num_buildings(),
                    params_.battery.capacity_kwh * params_.initial_soc_fraction);
  started_ = true;
  return observation_at(0);
}

int DistrictEnv::current_hour() const {
  return dataset_->hour[std::min(state_.t, horizon() - 1)];
}

std::vector<double> DistrictEnv::observation_at(int t) const {
  const int row = std::min(t, horizon() - 1);
  auto norm = [](double v, double lo, double hi) {
    if (hi <= lo) return 0.0;  // constant column
    return 2.0 * (v - lo) / (hi - lo) - 1.0;
  };
  std::vector<double> obs;
  obs.reserve(observation_dim());
  const double hour_phase = kTwoPi * dataset_->hour[row] / 24.0;
  const double month_phase = kTwoPi * (dataset_->month[row] - 1) / 12.0;
  obs.push_back(std::sin(hour_phase));
  obs.push_back(std::cos(hour_phase));
  obs.push_back(std::sin(month_phase));
  obs.push_back(std::cos(month_phase));
  obs.push_back(norm(dataset_->t_out[row], t_out_min_, t_out_max_));
  obs.push_back(norm(dataset_->rh[row], rh_min_, rh_max_));
  obs.push_back(norm(dataset_->price[row], price_min_, price_max_));
  obs.push_back(norm(dataset_->carbon[row], carbon_min_, carbon_max_));
  obs.push_back(norm(dataset_->setpoint[row], setpoint_min_, setpoint_max_));
  for (int b = 0; b < num_buildings(); ++b) {
    obs.push_back(state_.soc[b] / params_.battery.capacity_kwh);
  }
  return obs;
}

StepResult DistrictEnv::step(const std::vector<double>& action) {
  if (!started_) throw UsageError("step before reset");
  if (done()) throw UsageError("step after episode end");
  if (action.size() != static_cast<std::size_t>(num_buildings())) {
    throw UsageError("action dimension " + std::to_string(action.size()) +
                     ", expected " + std::to_string(num_buildings()));
  }

  const int t = state_.t;
  const BatteryParams& bat = params_.battery;
  double net_energy = 0.0;
  for (int b = 0; b < num_buildings(); ++b) {
    const double a = std::clamp(action[b], -1.0, 1.0);
    const double power = a * bat.nominal_power_kw;  // kWh over the hour
    double charge_draw = 0.0;
    double discharge_release = 0.0;
    if (power >= 0.0) {
      // stored increase limited by headroom; grid draw pays the efficiency
      const double headroom = bat.capacity_kwh - state_.soc[b];
      const double stored = std::min(power * bat.charge_efficiency, headroom);
      charge_draw = stored / bat.charge_efficiency;
      state_.soc[b] += stored;
    } else {
      // requested delivery at the building bus; SoC pays the efficiency
      const double requested = -power;
      const double removed =
          std::min(requested / bat.discharge_efficiency, state_.soc[b]);
      discharge_release = removed * bat.discharge_efficiency;
      state_.soc[b] -= removed;
    }
    state_.soc[b] = std::clamp(state_.soc[b], 0.0, bat.capacity_kwh);
    net_energy += dataset_->load[b][t] - dataset_->solar[b][t] + charge_draw -
                  discharge_release;
  }

  StepResult r;
  r.signals = reward::StepSignals{
      .net_energy = net_energy,
      .price = dataset_->price[t],
      .carbon_intensity = dataset_->carbon[t],
      .t_out = dataset_->t_out[t],
      .rh = dataset_->rh[t],
      .month = dataset_->month[t],
      .hour = dataset_->hour[t],
      .setpoint = dataset_->setpoint[t],
      .pricing_available = dataset_->pricing_available[t] != 0,
  };
  state_.t = t + 1;
  r.done = done();
  r.observation = observation_at(state_.t);
  return r;
}

}  // namespace bems::env
