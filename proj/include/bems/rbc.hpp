#pragma once

#include <vector>

namespace bems::baseline {

// Hour-driven battery schedule: charge overnight, discharge across the
// evening price peak. Default rates fill the battery over the nine
// charge hours and empty it over the five discharge hours.
struct RbcSchedule {
  std::vector<int> charge_hours = {22, 23, 0, 1, 2, 3, 4, 5, 6};
  std::vector<int> discharge_hours = {16, 17, 18, 19, 20};
  double charge_rate = 1.0 / 9.0;
  double discharge_rate = 1.0 / 5.0;

  void validate() const;  // disjoint hour sets, rates in (0, 1]
};

// Pure function of the hour: +charge_rate for every building during
// charge hours, -discharge_rate during discharge hours, zero otherwise.
std::vector<double> rbc_action(int hour, const RbcSchedule& schedule,
                               int num_buildings);

}  // namespace bems::baseline
