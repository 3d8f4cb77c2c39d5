#include "bems/comfort.hpp"

#include <cmath>

#include "bems/errors.hpp"
#include "bems/rng.hpp"
#include "doctest.h"
#include "pmv_reference_grid.hpp"

using namespace bems;
using namespace bems::comfort;

TEST_CASE("vapor pressure endpoints and linearity in rh") {
  CHECK(vapor_pressure(20.0, 0.0) == 0.0);
  CHECK(std::abs(vapor_pressure(20.0, 100.0) - 2337.0) <= 15.0);
  CHECK(vapor_pressure(20.0, 50.0) == 0.5 * vapor_pressure(20.0, 100.0));
}

TEST_CASE("vapor pressure monotone in both arguments") {
  double prev = vapor_pressure(-10.0, 40.0);
  for (double t = -5.0; t <= 40.0; t += 5.0) {
    const double v = vapor_pressure(t, 40.0);
    CHECK(v > prev);
    prev = v;
  }
  prev = vapor_pressure(25.0, 0.0);
  for (double rh = 10.0; rh <= 100.0; rh += 10.0) {
    const double v = vapor_pressure(25.0, rh);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("vapor pressure rejects out-of-range inputs") {
  CHECK_THROWS_AS(vapor_pressure(20.0, 101.0), DomainError);
  CHECK_THROWS_AS(vapor_pressure(20.0, -1.0), DomainError);
  CHECK_THROWS_AS(vapor_pressure(70.0, 50.0), DomainError);
  CHECK_THROWS_AS(vapor_pressure(-50.0, 50.0), DomainError);
}

TEST_CASE("ComfortInputs validates fields by name") {
  CHECK_THROWS_WITH_AS(ComfortInputs(20, 20, 0.1, 120, 1.2, 0.5),
                       doctest::Contains("rh"), DomainError);
  CHECK_THROWS_WITH_AS(ComfortInputs(-45, 20, 0.1, 50, 1.2, 0.5),
                       doctest::Contains("tdb"), DomainError);
  CHECK_THROWS_AS(ComfortInputs(20, 20, -0.1, 50, 1.2, 0.5), DomainError);
  CHECK_THROWS_AS(ComfortInputs(20, 20, 0.1, 50, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(ComfortInputs(20, 20, 0.1, 50, 1.2, -0.1), DomainError);
}

TEST_CASE("PMV anchor cases") {
  const PmvResult cool = compute_pmv({22, 22, 0.10, 60, 1.2, 0.5});
  CHECK(std::abs(cool.pmv - (-0.75)) <= 0.02);
  CHECK(std::abs(cool.ppd - 17.0) <= 1.0);

  const PmvResult warm = compute_pmv({27, 27, 0.10, 60, 1.2, 0.5});
  CHECK(std::abs(warm.pmv - 0.77) <= 0.02);
}

TEST_CASE("PMV strictly increases with air temperature") {
  for (double t = 12.0; t <= 28.0; t += 4.0) {
    const double lo = compute_pmv({t, 22, 0.10, 50, 1.2, 0.7}).pmv;
    const double hi = compute_pmv({t + 5.0, 22, 0.10, 50, 1.2, 0.7}).pmv;
    CHECK(hi > lo);
  }
}

TEST_CASE("PMV matches the reference grid") {
  for (const pmv_ref::Case& c : pmv_ref::kGrid) {
    const PmvResult r = compute_pmv({c.tdb, c.tr, c.vr, c.rh, c.met, c.clo});
    INFO("tdb=", c.tdb, " tr=", c.tr, " rh=", c.rh, " clo=", c.clo);
    CHECK(std::abs(r.pmv - c.pmv) <= 0.02);
    CHECK(std::abs(r.ppd - c.ppd) <= 1.0);
    CHECK(r.ppd >= 5.0);
  }
}

TEST_CASE("PPD is even with minimum 5 at neutrality") {
  CHECK(ppd_from_pmv(0.0) == 5.0);
  double prev = ppd_from_pmv(0.0);
  for (double p = 0.1; p <= 3.5; p += 0.1) {
    CHECK(ppd_from_pmv(p) == ppd_from_pmv(-p));
    const double v = ppd_from_pmv(p);
    CHECK(v >= prev);
    prev = v;
  }
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const double p = rng.uniform(-4.0, 4.0);
    CHECK(ppd_from_pmv(p) == ppd_from_pmv(-p));
    CHECK(ppd_from_pmv(p) >= 5.0);
  }
}

TEST_CASE("PPD recomputed from a PmvResult is symmetric") {
  const PmvResult r = compute_pmv({25, 25, 0.10, 55, 1.2, 0.5});
  CHECK(ppd_from_pmv(r.pmv) == ppd_from_pmv(-r.pmv));
  CHECK(r.ppd == ppd_from_pmv(r.pmv));
}

TEST_CASE("clothing schedule partitions the year") {
  CHECK(clothing_for_month(7) == 0.5);
  CHECK(clothing_for_month(1) == 1.0);
  CHECK(clothing_for_month(9) == 0.5);
  CHECK(clothing_for_month(10) == 1.0);
  for (int m = 1; m <= 12; ++m) {
    CHECK(clothing_for_month(m) == ((m >= 6 && m <= 9) ? 0.5 : 1.0));
  }
  CHECK_THROWS_AS(clothing_for_month(0), DomainError);
  CHECK_THROWS_AS(clothing_for_month(13), DomainError);
}

TEST_CASE("comfort reward mapping") {
  CHECK(pmv_comfort_reward(0.0) == 1.0);
  CHECK(pmv_comfort_reward(3.0) == 0.0);
  CHECK(pmv_comfort_reward(-3.0) == 0.0);
  CHECK(pmv_comfort_reward(1.5) == 0.5);
  CHECK(pmv_comfort_reward(5.0) == 0.0);  // clamped beyond the range

  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const double p = rng.uniform(-6.0, 6.0);
    const double r = pmv_comfort_reward(p);
    CHECK(r == pmv_comfort_reward(-p));
    CHECK(r >= 0.0);
    CHECK(r <= 1.0);
  }
  CHECK_THROWS_AS(pmv_comfort_reward(std::nan("")), DomainError);
}

TEST_CASE("compute_pmv is deterministic") {
  const ComfortInputs in(23.5, 24.0, 0.12, 45, 1.3, 0.8);
  const PmvResult a = compute_pmv(in);
  const PmvResult b = compute_pmv(in);
  CHECK(a.pmv == b.pmv);
  CHECK(a.ppd == b.ppd);
}
