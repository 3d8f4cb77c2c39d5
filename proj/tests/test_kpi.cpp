#include "bems/kpi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bems/errors.hpp"
#include "bems/rng.hpp"
#include "doctest.h"

using namespace bems;
using namespace bems::kpi;

namespace {

// Independent naive recomputation of the five KPIs, one pass per metric,
// day slices taken explicitly. Kept apart from the implementation on
// purpose; sums also run left to right.
KpiValues brute_force_kpis(const std::vector<double>& e,
                           const std::vector<double>& price,
                           const std::vector<double>& carbon) {
  KpiValues k;
  for (std::size_t t = 0; t < e.size(); ++t) {
    if (e[t] > 0.0) k.cost += price[t] * e[t];
  }
  for (std::size_t t = 0; t < e.size(); ++t) {
    if (e[t] > 0.0) k.carbon += carbon[t] * e[t];
  }
  for (std::size_t t = 0; t < e.size(); ++t) {
    if (e[t] > 0.0) k.consumption += e[t];
  }
  for (std::size_t t = 1; t < e.size(); ++t) {
    k.ramping += std::abs(e[t] - e[t - 1]);
  }
  const std::size_t days = e.size() / 24;
  double acc = 0.0;
  for (std::size_t d = 0; d < days; ++d) {
    acc += *std::max_element(e.begin() + d * 24, e.begin() + (d + 1) * 24);
  }
  k.daily_peak = acc / static_cast<double>(days);
  return k;
}

}  // namespace

TEST_CASE("ramping over a short segment") {
  std::vector<double> e(24, 0.0);
  e[0] = 1.0;
  e[1] = 2.0;
  e[2] = 1.0;
  std::vector<double> ones(24, 1.0);
  // segment [1,2,1] contributes 2; the fall back to the zero padding adds 1
  CHECK(compute_kpis(e, ones, ones).ramping == 3.0);

  std::vector<double> e2(24, 1.0);
  e2[1] = 2.0;
  CHECK(compute_kpis(e2, ones, ones).ramping == 2.0);
}

TEST_CASE("constant day") {
  const double c = 1.7, p = 0.31;
  std::vector<double> e(24, c), price(24, p), carbon(24, 0.2);
  const KpiValues k = compute_kpis(e, price, carbon);
  CHECK(k.cost == doctest::Approx(24 * p * c).epsilon(1e-14));
  CHECK(k.daily_peak == c);
  CHECK(k.ramping == 0.0);
  CHECK(k.consumption == doctest::Approx(24 * c).epsilon(1e-14));
}

TEST_CASE("exports are excluded from billing metrics, kept in the profile") {
  std::vector<double> e(24, 0.0), price(24, 1.0), carbon(24, 1.0);
  e[0] = -2.0;
  e[1] = 3.0;
  const KpiValues k = compute_kpis(e, price, carbon);
  CHECK(k.consumption == 3.0);
  CHECK(k.cost == 3.0);
  CHECK(k.carbon == 3.0);
  CHECK(k.daily_peak == 3.0);    // signed max
  CHECK(k.ramping == 5.0 + 3.0); // |3-(-2)| + |0-3|, first step has no prior

  std::vector<double> all_neg(24, -1.0);
  const KpiValues kn = compute_kpis(all_neg, price, carbon);
  CHECK(kn.consumption == 0.0);
  CHECK(kn.daily_peak == -1.0);
}

TEST_CASE("series validation") {
  std::vector<double> e(23, 1.0), p(23, 1.0), c(23, 1.0);
  CHECK_THROWS_AS(compute_kpis(e, p, c), UsageError);
  e.resize(24);
  CHECK_THROWS_AS(compute_kpis(e, p, c), UsageError);  // length mismatch
  CHECK_THROWS_AS(compute_kpis({}, {}, {}), UsageError);
}

TEST_CASE("ratio report") {
  KpiValues a{10, 8, 6, 4, 2};
  const KpiReport self = ratio_report(a, a);
  CHECK(*self.ratios.cost == 1.0);
  CHECK(*self.ratios.carbon == 1.0);
  CHECK(*self.ratios.consumption == 1.0);
  CHECK(*self.ratios.ramping == 1.0);
  CHECK(*self.ratios.daily_peak == 1.0);

  KpiValues doubled{20, 16, 12, 8, 4};
  const KpiReport r = ratio_report(doubled, a);
  CHECK(*r.ratios.cost == 2.0);
  CHECK(*r.ratios.daily_peak == 2.0);

  KpiValues zero{};
  const KpiReport undef = ratio_report(a, zero);
  CHECK_FALSE(undef.ratios.cost.has_value());
  CHECK_FALSE(undef.ratios.ramping.has_value());
}

TEST_CASE("seed aggregation") {
  KpiValues base{10, 8, 6, 4, 2};
  auto with_cost = [&](double cost_ratio) {
    KpiValues v = base;
    v.cost = base.cost * cost_ratio;
    return ratio_report(v, base);
  };

  const KpiAggregate single = aggregate_seeds({with_cost(1.5)});
  CHECK(single.cost.mean == 1.5);
  CHECK(single.cost.stddev == 0.0);
  CHECK(single.n == 1);

  const KpiAggregate same =
      aggregate_seeds({with_cost(1.2), with_cost(1.2), with_cost(1.2),
                       with_cost(1.2), with_cost(1.2)});
  CHECK(same.cost.mean == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(same.cost.stddev == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  const KpiAggregate spread =
      aggregate_seeds({with_cost(1.0), with_cost(2.0), with_cost(3.0)});
  CHECK(spread.cost.mean == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(spread.cost.stddev == doctest::Approx(1.0).epsilon(1e-15));

  CHECK_THROWS_AS(aggregate_seeds({}), UsageError);
}

TEST_CASE("KPIs equal the brute-force oracle exactly on random instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const int t_end = 96;
    std::vector<double> e(t_end), p(t_end), c(t_end);
    for (int t = 0; t < t_end; ++t) {
      e[t] = rng.uniform(-5.0, 20.0);
      p[t] = rng.uniform(0.0, 1.0);
      c[t] = rng.uniform(0.0, 0.5);
    }
    const KpiValues got = compute_kpis(e, p, c);
    const KpiValues want = brute_force_kpis(e, p, c);
    CHECK(got.cost == want.cost);
    CHECK(got.carbon == want.carbon);
    CHECK(got.consumption == want.consumption);
    CHECK(got.ramping == want.ramping);
    CHECK(got.daily_peak == want.daily_peak);
  }
}

TEST_CASE("ratios are invariant to a common scale") {
  Rng rng(55);
  std::vector<double> e(48), p(48, 0.3), c(48, 0.2), e2(48);
  for (int t = 0; t < 48; ++t) e[t] = rng.uniform(-2.0, 10.0);
  for (int t = 0; t < 48; ++t) e2[t] = rng.uniform(0.0, 8.0);
  const double scale = 3.7;
  std::vector<double> es(48), e2s(48);
  for (int t = 0; t < 48; ++t) {
    es[t] = scale * e[t];
    e2s[t] = scale * e2[t];
  }
  const KpiReport r1 = ratio_report(compute_kpis(e, p, c), compute_kpis(e2, p, c));
  const KpiReport r2 =
      ratio_report(compute_kpis(es, p, c), compute_kpis(e2s, p, c));
  CHECK(*r1.ratios.cost == doctest::Approx(*r2.ratios.cost).epsilon(1e-12));
  CHECK(*r1.ratios.carbon == doctest::Approx(*r2.ratios.carbon).epsilon(1e-12));
  CHECK(*r1.ratios.consumption ==
        doctest::Approx(*r2.ratios.consumption).epsilon(1e-12));
  CHECK(*r1.ratios.ramping == doctest::Approx(*r2.ratios.ramping).epsilon(1e-12));
  CHECK(*r1.ratios.daily_peak ==
        doctest::Approx(*r2.ratios.daily_peak).epsilon(1e-12));
}

TEST_CASE("day permutation leaves billing metrics and daily peak unchanged") {
  Rng rng(66);
  const int days = 4, n = days * 24;
  std::vector<double> e(n), p(n), c(n);
  for (int t = 0; t < n; ++t) {
    e[t] = rng.uniform(-1.0, 6.0);
    p[t] = rng.uniform(0.1, 0.6);
    c[t] = rng.uniform(0.1, 0.4);
  }
  // rotate whole days, carrying the price/carbon columns along
  std::vector<double> e2(n), p2(n), c2(n);
  for (int d = 0; d < days; ++d) {
    const int src = (d + 1) % days;
    for (int h = 0; h < 24; ++h) {
      e2[d * 24 + h] = e[src * 24 + h];
      p2[d * 24 + h] = p[src * 24 + h];
      c2[d * 24 + h] = c[src * 24 + h];
    }
  }
  const KpiValues a = compute_kpis(e, p, c);
  const KpiValues b = compute_kpis(e2, p2, c2);
  CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-9));
  CHECK(a.carbon == doctest::Approx(b.carbon).epsilon(1e-9));
  CHECK(a.consumption == doctest::Approx(b.consumption).epsilon(1e-9));
  CHECK(a.daily_peak == doctest::Approx(b.daily_peak).epsilon(1e-9));
  // ramping is order-sensitive by design; no assertion
}
