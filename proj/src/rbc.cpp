#include "bems/rbc.hpp"

#include <algorithm>

#include "bems/errors.hpp"

namespace bems::baseline {

void RbcSchedule::validate() const {
  for (int h : charge_hours) {
    if (h < 0 || h > 23) throw ConfigError("charge hour out of 0..23");
    if (std::find(discharge_hours.begin(), discharge_hours.end(), h) !=
        discharge_hours.end()) {
      throw ConfigError("hour " + std::to_string(h) +
                        " appears in both charge and discharge sets");
    }
  }
  for (int h : discharge_hours) {
    if (h < 0 || h > 23) throw ConfigError("discharge hour out of 0..23");
  }
  if (!(charge_rate > 0.0) || charge_rate > 1.0 || !(discharge_rate > 0.0) ||
      discharge_rate > 1.0) {
    throw ConfigError("schedule rates must be in (0, 1]");
  }
}

std::vector<double> rbc_action(int hour, const RbcSchedule& schedule,
                               int num_buildings) {
  if (hour < 0 || hour > 23) throw DomainError("hour out of 0..23");
  double a = 0.0;
  if (std::find(schedule.charge_hours.begin(), schedule.charge_hours.end(),
                hour) != schedule.charge_hours.end()) {
    a = schedule.charge_rate;
  } else if (std::find(schedule.discharge_hours.begin(),
                       schedule.discharge_hours.end(),
                       hour) != schedule.discharge_hours.end()) {
    a = -schedule.discharge_rate;
  }
  return std::vector<double>(num_buildings, a);
}

}  // namespace bems::baseline
