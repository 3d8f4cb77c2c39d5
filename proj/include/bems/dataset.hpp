#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bems/reward.hpp"

namespace bems::env {

// Column-wise exogenous data for one simulated district: T hourly rows of
// weather/tariff signals plus per-building load and solar profiles.
// Immutable once built; shared read-only across seed workers.
struct Dataset {
  int num_buildings = 0;
  std::vector<int> hour;      // 0..23, cycling from row 0
  std::vector<int> month;     // 1..12
  std::vector<double> t_out;  // degC
  std::vector<double> rh;     // %
  std::vector<double> price;  // currency/kWh
  std::vector<double> carbon;           // kgCO2/kWh
  std::vector<double> setpoint;         // degC
  std::vector<std::uint8_t> pricing_available;
  std::vector<std::vector<double>> load;   // [B][T], kWh, non-shiftable
  std::vector<std::vector<double>> solar;  // [B][T], kWh

  int horizon() const { return static_cast<int>(hour.size()); }

  // Checks row counts, hour cycling, month/rh/price/carbon ranges and
  // profile signs; throws ParseError with the offending row.
  void validate() const;

  bool operator==(const Dataset&) const = default;
};

// 365-day calendar helper: month (1..12) for a day-of-year index, years
// wrapping for horizons beyond 8760.
int month_of_day(int day);

// Deterministic synthetic district: annual+diurnal temperature sinusoids
// with seeded noise, two-tier time-of-use price (peak hours 16-20),
// diurnal carbon intensity in [0.10, 0.45], per-building morning/evening
// load peaks and a clear-sky solar bell, constant 21 degC setpoint.
Dataset generate_synthetic_dataset(std::uint64_t seed, int num_buildings,
                                   int horizon);

// CSV schema: header row
//   hour,month,t_out,rh,price,carbon,setpoint,pricing_available,
//   load_0..load_{B-1},solar_0..solar_{B-1}
// UTF-8, '.' decimal separator, one row per hour. Doubles are written
// with enough digits to round-trip bit-exactly.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& d, const std::string& path);

// Frozen reward normalizers: e_ref is the 95th percentile (nearest rank)
// of the hourly district non-shiftable load; price/carbon maxima are the
// dataset column maxima.
reward::RewardNormalizers compute_reward_normalizers(const Dataset& d);

}  // namespace bems::env
