#include "bems/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bems/errors.hpp"
#include "bems/rng.hpp"

namespace bems::env {

namespace {

constexpr int kDaysPerMonth[12] = {31, 28, 31, 30, 31, 30,
                                   31, 31, 30, 31, 30, 31};
constexpr double kTwoPi = 6.28318530717958647692;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const std::string& path, int row,
                             const std::string& what) {
  std::ostringstream os;
  os << path << ": row " << row << ": " << what;
  throw ParseError(os.str());
}

}  // namespace

int month_of_day(int day) {
  int d = day % 365;
  for (int m = 0; m < 12; ++m) {
    if (d < kDaysPerMonth[m]) return m + 1;
    d -= kDaysPerMonth[m];
  }
  return 12;  // unreachable
}

void Dataset::validate() const {
  const int t_end = horizon();
  if (t_end < 24) {
    throw ParseError("dataset must have at least 24 rows, got " +
                     std::to_string(t_end));
  }
  if (t_end % 24 != 0) {
    throw ParseError("dataset row count " + std::to_string(t_end) +
                     " is not a whole number of days");
  }
  if (num_buildings < 1) throw ParseError("dataset needs >= 1 building");
  const std::size_t n = static_cast<std::size_t>(t_end);
  if (month.size() != n || t_out.size() != n || rh.size() != n ||
      price.size() != n || carbon.size() != n || setpoint.size() != n ||
      pricing_available.size() != n) {
    throw ParseError("dataset column lengths disagree");
  }
  if (load.size() != static_cast<std::size_t>(num_buildings) ||
      solar.size() != static_cast<std::size_t>(num_buildings)) {
    throw ParseError("per-building column count disagrees with num_buildings");
  }
  for (int b = 0; b < num_buildings; ++b) {
    if (load[b].size() != n || solar[b].size() != n) {
      throw ParseError("per-building column lengths disagree");
    }
  }
  for (int t = 0; t < t_end; ++t) {
    const std::string at = "row " + std::to_string(t) + ": ";
    if (hour[t] != t % 24) throw ParseError(at + "hour does not cycle 0..23");
    if (month[t] < 1 || month[t] > 12) throw ParseError(at + "month out of range");
    if (!(rh[t] >= 0.0 && rh[t] <= 100.0)) throw ParseError(at + "rh out of [0,100]");
    if (!(price[t] >= 0.0)) throw ParseError(at + "negative price");
    if (!(carbon[t] >= 0.0)) throw ParseError(at + "negative carbon intensity");
    if (!std::isfinite(t_out[t])) throw ParseError(at + "non-finite t_out");
    if (!std::isfinite(setpoint[t])) throw ParseError(at + "non-finite setpoint");
    for (int b = 0; b < num_buildings; ++b) {
      if (!(load[b][t] >= 0.0)) throw ParseError(at + "negative load");
      if (!(solar[b][t] >= 0.0)) throw ParseError(at + "negative solar");
    }
  }
}

Dataset generate_synthetic_dataset(std::uint64_t seed, int num_buildings,
                                   int horizon) {
  if (num_buildings < 1) throw ConfigError("num_buildings must be >= 1");
  if (horizon < 24) throw ConfigError("horizon must be >= 24");
  if (horizon % 24 != 0) {
    throw ConfigError("horizon " + std::to_string(horizon) +
                      " is not a whole number of days");
  }

  Rng rng(seed);
  Dataset d;
  d.num_buildings = num_buildings;
  const std::size_t n = static_cast<std::size_t>(horizon);
  d.hour.resize(n);
  d.month.resize(n);
  d.t_out.resize(n);
  d.rh.resize(n);
  d.price.resize(n);
  d.carbon.resize(n);
  d.setpoint.resize(n);
  d.pricing_available.resize(n);
  d.load.assign(num_buildings, std::vector<double>(n));
  d.solar.assign(num_buildings, std::vector<double>(n));

  std::vector<double> load_scale(num_buildings), solar_scale(num_buildings);
  for (int b = 0; b < num_buildings; ++b) {
    load_scale[b] = rng.uniform(0.8, 1.2);
    solar_scale[b] = rng.uniform(2.0, 3.0);  // kWh at the noon peak
  }

  for (int t = 0; t < horizon; ++t) {
    const int hour = t % 24;
    const int day = t / 24;
    const int doy = day % 365;
    d.hour[t] = hour;
    d.month[t] = month_of_day(doy);

    const double annual = 14.0 - 11.0 * std::cos(kTwoPi * (doy - 14) / 365.0);
    const double diurnal = -4.0 * std::cos(kTwoPi * (hour - 5) / 24.0);
    d.t_out[t] = annual + diurnal + rng.normal();

    d.rh[t] = std::clamp(60.0 + 10.0 * rng.normal(), 20.0, 95.0);
    d.price[t] = (hour >= 16 && hour <= 20) ? 0.54 : 0.20;
    d.carbon[t] = 0.275 + 0.175 * std::cos(kTwoPi * (hour - 19) / 24.0);
    d.setpoint[t] = 21.0;
    d.pricing_available[t] = 1;

    for (int b = 0; b < num_buildings; ++b) {
      const double morning = 0.50 * std::exp(-std::pow(hour - 7.5, 2) / 4.5);
      const double evening = 0.80 * std::exp(-std::pow(hour - 19.0, 2) / 8.0);
      const double base = load_scale[b] * (0.30 + morning + evening);
      d.load[b][t] = std::max(0.05, base + 0.05 * rng.normal());
      const double bell =
          (hour >= 6 && hour <= 18)
              ? std::pow(std::sin(kTwoPi * (hour - 6) / 24.0), 2)
              : 0.0;
      d.solar[b][t] = solar_scale[b] * bell;
    }
  }
  d.validate();
  return d;
}

void save_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "hour,month,t_out,rh,price,carbon,setpoint,pricing_available";
  for (int b = 0; b < d.num_buildings; ++b) out << ",load_" << b;
  for (int b = 0; b < d.num_buildings; ++b) out << ",solar_" << b;
  out << "\n";
  for (int t = 0; t < d.horizon(); ++t) {
    out << d.hour[t] << ',' << d.month[t] << ',' << fmt_double(d.t_out[t])
        << ',' << fmt_double(d.rh[t]) << ',' << fmt_double(d.price[t]) << ','
        << fmt_double(d.carbon[t]) << ',' << fmt_double(d.setpoint[t]) << ','
        << int(d.pricing_available[t]);
    for (int b = 0; b < d.num_buildings; ++b) out << ',' << fmt_double(d.load[b][t]);
    for (int b = 0; b < d.num_buildings; ++b) out << ',' << fmt_double(d.solar[b][t]);
    out << "\n";
  }
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || line.empty()) {
    throw ParseError(path + ": empty file");
  }
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  const std::vector<std::string> fixed = {"hour", "month", "t_out", "rh",
                                          "price", "carbon", "setpoint",
                                          "pricing_available"};
  if (header.size() < fixed.size()) {
    throw ParseError(path + ": header has " + std::to_string(header.size()) +
                     " columns, expected at least " +
                     std::to_string(fixed.size()));
  }
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (header[i] != fixed[i]) {
      throw ParseError(path + ": header column " + std::to_string(i) +
                       " is '" + header[i] + "', expected '" + fixed[i] + "'");
    }
  }
  const std::size_t rest = header.size() - fixed.size();
  if (rest == 0 || rest % 2 != 0) {
    throw ParseError(path + ": expected matching load_i/solar_i column pairs");
  }
  const int num_buildings = static_cast<int>(rest / 2);
  for (int b = 0; b < num_buildings; ++b) {
    const std::string want_load = "load_" + std::to_string(b);
    const std::string want_solar = "solar_" + std::to_string(b);
    if (header[fixed.size() + b] != want_load) {
      throw ParseError(path + ": expected column '" + want_load + "'");
    }
    if (header[fixed.size() + num_buildings + b] != want_solar) {
      throw ParseError(path + ": expected column '" + want_solar + "'");
    }
  }

  Dataset d;
  d.num_buildings = num_buildings;
  d.load.assign(num_buildings, {});
  d.solar.assign(num_buildings, {});

  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
    }
    if (cells.size() != header.size()) {
      parse_fail(path, row,
                 "has " + std::to_string(cells.size()) + " cells, expected " +
                     std::to_string(header.size()));
    }
    auto num = [&](std::size_t col) -> double {
      try {
        std::size_t used = 0;
        const double v = std::stod(cells[col], &used);
        if (used != cells[col].size()) throw std::invalid_argument("trailing");
        return v;
      } catch (const std::exception&) {
        parse_fail(path, row,
                   "column '" + header[col] + "': non-numeric cell '" +
                       cells[col] + "'");
      }
    };
    d.hour.push_back(static_cast<int>(num(0)));
    d.month.push_back(static_cast<int>(num(1)));
    d.t_out.push_back(num(2));
    d.rh.push_back(num(3));
    d.price.push_back(num(4));
    d.carbon.push_back(num(5));
    d.setpoint.push_back(num(6));
    d.pricing_available.push_back(num(7) != 0.0 ? 1 : 0);
    for (int b = 0; b < num_buildings; ++b) d.load[b].push_back(num(8 + b));
    for (int b = 0; b < num_buildings; ++b) {
      d.solar[b].push_back(num(8 + num_buildings + b));
    }
    ++row;
  }
  d.validate();
  return d;
}

reward::RewardNormalizers compute_reward_normalizers(const Dataset& d) {
  const int t_end = d.horizon();
  std::vector<double> district_load(t_end, 0.0);
  for (int t = 0; t < t_end; ++t) {
    for (int b = 0; b < d.num_buildings; ++b) district_load[t] += d.load[b][t];
  }
  std::vector<double> sorted = district_load;
  std::sort(sorted.begin(), sorted.end());
  // nearest-rank 95th percentile
  const std::size_t idx =
      std::min(sorted.size() - 1,
               static_cast<std::size_t>(std::ceil(0.95 * sorted.size())) - 1);
  reward::RewardNormalizers n;
  n.e_ref = sorted[idx];
  n.price_max = *std::max_element(d.price.begin(), d.price.end());
  n.carbon_max = *std::max_element(d.carbon.begin(), d.carbon.end());
  if (!(n.e_ref > 0.0) || !(n.price_max > 0.0) || !(n.carbon_max > 0.0)) {
    throw ConfigError("dataset yields nonpositive reward normalizers");
  }
  return n;
}

}  // namespace bems::env
