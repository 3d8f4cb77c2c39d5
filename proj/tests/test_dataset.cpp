#include "bems/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "bems/errors.hpp"
#include "doctest.h"

using namespace bems;
using namespace bems::env;

namespace {
std::filesystem::path tmp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}
}  // namespace

TEST_CASE("synthetic dataset is deterministic per seed") {
  const Dataset a = generate_synthetic_dataset(7, 3, 48);
  const Dataset b = generate_synthetic_dataset(7, 3, 48);
  CHECK(a == b);
  const Dataset c = generate_synthetic_dataset(8, 3, 48);
  CHECK(a != c);
}

TEST_CASE("no solar at night, bell during the day") {
  const Dataset d = generate_synthetic_dataset(1, 4, 24 * 7);
  for (int t = 0; t < d.horizon(); ++t) {
    const int hour = d.hour[t];
    for (int b = 0; b < d.num_buildings; ++b) {
      if (hour < 6 || hour > 18) {
        CHECK(d.solar[b][t] == 0.0);
      } else {
        CHECK(d.solar[b][t] >= 0.0);
      }
    }
  }
  // noon beats dawn for every building
  for (int b = 0; b < d.num_buildings; ++b) {
    CHECK(d.solar[b][12] > d.solar[b][7]);
  }
}

TEST_CASE("calendar layout over a full year") {
  const Dataset d = generate_synthetic_dataset(2, 1, 8760);
  CHECK(d.month[0] == 1);
  CHECK(d.month[d.horizon() - 1] == 12);
  CHECK(d.hour[0] == 0);
  CHECK(d.hour[25] == 1);
  // January has 31 days
  CHECK(d.month[31 * 24 - 1] == 1);
  CHECK(d.month[31 * 24] == 2);
}

TEST_CASE("tariff and carbon profiles") {
  const Dataset d = generate_synthetic_dataset(3, 2, 48);
  for (int t = 0; t < d.horizon(); ++t) {
    const bool peak = d.hour[t] >= 16 && d.hour[t] <= 20;
    CHECK(d.price[t] == (peak ? 0.54 : 0.20));
    CHECK(d.carbon[t] >= 0.10 - 1e-12);
    CHECK(d.carbon[t] <= 0.45 + 1e-12);
    CHECK(d.rh[t] >= 20.0);
    CHECK(d.rh[t] <= 95.0);
    CHECK(d.setpoint[t] == 21.0);
    CHECK(d.pricing_available[t] == 1);
  }
}

TEST_CASE("generator rejects bad parameters") {
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 1, 25), ConfigError);
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 1, 0), ConfigError);
  CHECK_THROWS_AS(generate_synthetic_dataset(1, 0, 48), ConfigError);
}

TEST_CASE("CSV round-trip is identical") {
  const Dataset d = generate_synthetic_dataset(42, 5, 24 * 14);
  const auto path = tmp_file("bems_roundtrip.csv");
  save_dataset(d, path.string());
  const Dataset loaded = load_dataset(path.string());
  CHECK(d == loaded);
  std::filesystem::remove(path);
}

TEST_CASE("load rejects malformed files") {
  const auto path = tmp_file("bems_bad.csv");

  {
    std::ofstream out(path);
  }
  CHECK_THROWS_AS(load_dataset(path.string()), ParseError);

  {
    std::ofstream out(path);
    out << "hour,month,t_out,rh,price,carbon,setpoint,pricing_available,"
           "load_0,solar_0\n";
    for (int t = 0; t < 23; ++t) {
      out << t << ",1,10,50,0.2,0.3,21,1,0.5,0\n";
    }
  }
  CHECK_THROWS_WITH_AS(load_dataset(path.string()), doctest::Contains("23"),
                       ParseError);

  {
    std::ofstream out(path);
    out << "hour,month,t_out,rh,price,carbon,setpoint,pricing_available,"
           "load_0,solar_0\n";
    for (int t = 0; t < 24; ++t) {
      if (t == 5) {
        out << t << ",1,oops,50,0.2,0.3,21,1,0.5,0\n";
      } else {
        out << t << ",1,10,50,0.2,0.3,21,1,0.5,0\n";
      }
    }
  }
  CHECK_THROWS_WITH_AS(load_dataset(path.string()), doctest::Contains("t_out"),
                       ParseError);

  {
    std::ofstream out(path);
    out << "hour,month,t_out,rh\n0,1,10,50\n";
  }
  CHECK_THROWS_AS(load_dataset(path.string()), ParseError);

  CHECK_THROWS_AS(load_dataset("/nonexistent/p.csv"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("reward normalizers from the dataset") {
  const Dataset d = generate_synthetic_dataset(7, 5, 24 * 28);
  const reward::RewardNormalizers n = compute_reward_normalizers(d);
  CHECK(n.price_max == 0.54);
  CHECK(n.carbon_max == 0.45);
  CHECK(n.e_ref > 0.0);

  // independent nearest-rank percentile
  std::vector<double> district(d.horizon(), 0.0);
  for (int t = 0; t < d.horizon(); ++t) {
    for (int b = 0; b < d.num_buildings; ++b) district[t] += d.load[b][t];
  }
  std::sort(district.begin(), district.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(district.size()))) - 1;
  CHECK(n.e_ref == district[idx]);
  // a high percentile: most hourly draws sit below it
  int below = 0;
  for (double v : district) below += v <= n.e_ref ? 1 : 0;
  CHECK(below >= static_cast<int>(0.94 * district.size()));
}

TEST_CASE("month_of_day covers the 365-day calendar") {
  CHECK(month_of_day(0) == 1);
  CHECK(month_of_day(30) == 1);
  CHECK(month_of_day(31) == 2);
  CHECK(month_of_day(364) == 12);
  CHECK(month_of_day(365) == 1);  // wraps
}
