#include "bems/reward.hpp"

#include <cmath>

#include "bems/comfort.hpp"
#include "bems/errors.hpp"
#include "bems/rng.hpp"
#include "doctest.h"

using namespace bems;
using namespace bems::reward;

namespace {

StepSignals make_signals(double net = 0.0, double price = 0.2,
                         double carbon = 0.3, double t_out = 21.0,
                         double rh = 50.0, int month = 6, int hour = 12,
                         double setpoint = 21.0, bool pricing = true) {
  return StepSignals{net, price, carbon, t_out, rh, month, hour, setpoint,
                     pricing};
}

RewardNormalizers make_norms(double e_ref = 10.0, double price_max = 0.54,
                             double carbon_max = 0.45) {
  return RewardNormalizers{e_ref, price_max, carbon_max, false};
}

}  // namespace

TEST_CASE("energy channel endpoints and midpoint") {
  CHECK(r_energy(make_signals(0.0), 10.0) == 1.0);
  CHECK(r_energy(make_signals(10.0), 10.0) == 0.0);
  CHECK(r_energy(make_signals(5.0), 10.0) == 0.5);
  CHECK(r_energy(make_signals(-3.0), 10.0) == 1.0);   // export
  CHECK(r_energy(make_signals(25.0), 10.0) == 0.0);   // saturation
  CHECK_THROWS_AS(r_energy(make_signals(), 0.0), ConfigError);
  CHECK_THROWS_AS(r_energy(make_signals(), -1.0), ConfigError);
}

TEST_CASE("grid channel bilinearity and price factor") {
  const RewardNormalizers n = make_norms();
  CHECK(r_grid(make_signals(50.0, 0.0), n) == 1.0);
  CHECK(r_grid(make_signals(10.0, 0.54), n) == 0.0);
  CHECK(r_grid(make_signals(10.0, 0.27), n) == 0.5);
  RewardNormalizers bad = n;
  bad.price_max = 0.0;
  CHECK_THROWS_AS(r_grid(make_signals(), bad), ConfigError);
}

TEST_CASE("grid channel falls back to carbon intensity") {
  const RewardNormalizers n = make_norms();
  // row flags pricing unavailable
  StepSignals s = make_signals(10.0, 0.54, 0.45);
  s.pricing_available = false;
  CHECK(r_grid(s, n) == 0.0);  // carbon at its max, net at e_ref
  s.carbon_intensity = 0.225;
  CHECK(r_grid(s, n) == 0.5);

  // config switch forces the fallback even when pricing exists
  RewardNormalizers forced = n;
  forced.force_carbon_fallback = true;
  StepSignals s2 = make_signals(10.0, 0.0, 0.45);
  CHECK(r_grid(s2, forced) == 0.0);
}

TEST_CASE("setpoint deadband comfort") {
  CHECK(comfort_setpoint_deadband(21.0, 21.0) == 1.0);
  CHECK(comfort_setpoint_deadband(22.0, 21.0) == 1.0);  // at the edge
  CHECK(comfort_setpoint_deadband(20.0, 21.0) == 1.0);
  CHECK(comfort_setpoint_deadband(27.0, 21.0) == 0.0);  // d + s past setpoint
  CHECK(comfort_setpoint_deadband(24.5, 21.0) == 0.5);
  CHECK(comfort_setpoint_deadband(40.0, 21.0) == 0.0);
  CHECK_THROWS_AS(comfort_setpoint_deadband(std::nan(""), 21.0), DomainError);
}

TEST_CASE("naive comfort formula") {
  CHECK(comfort_naive(21.0) == 1.0);
  CHECK(comfort_naive(26.0) == 0.0);
  CHECK(comfort_naive(16.0) == 0.0);
  CHECK(comfort_naive(23.5) == 0.5);
  CHECK(comfort_naive(35.0) == 0.0);
}

TEST_CASE("registry reproduces the five conditions verbatim") {
  const auto& reg = condition_registry();
  REQUIRE(reg.size() == 5);

  const Condition& e1 = condition_for(ConditionId::E1);
  CHECK(!e1.weights.has_value());
  CHECK(e1.comfort_kind == ComfortKind::none);

  const Condition& e2 = condition_for(ConditionId::E2);
  REQUIRE(e2.weights.has_value());
  CHECK(e2.weights->alpha == 0.60);
  CHECK(e2.weights->beta == 0.20);
  CHECK(e2.weights->gamma == 0.20);
  CHECK(e2.comfort_kind == ComfortKind::setpoint_deadband);

  const Condition& e3 = condition_for(ConditionId::E3);
  CHECK(e3.weights->alpha == 1.00);
  CHECK(e3.weights->beta == 0.00);
  CHECK(e3.weights->gamma == 0.00);
  CHECK(e3.comfort_kind == ComfortKind::none);

  const Condition& e4 = condition_for(ConditionId::E4);
  CHECK(e4.weights->alpha == 0.70);
  CHECK(e4.weights->beta == 0.20);
  CHECK(e4.weights->gamma == 0.10);
  CHECK(e4.comfort_kind == ComfortKind::naive_deviation);

  const Condition& e5 = condition_for(ConditionId::E5);
  CHECK(e5.weights->alpha == e2.weights->alpha);
  CHECK(e5.weights->beta == e2.weights->beta);
  CHECK(e5.weights->gamma == e2.weights->gamma);
  CHECK(e5.comfort_kind == ComfortKind::pmv);
}

TEST_CASE("compose rejects the rule-based condition") {
  CHECK_THROWS_AS(
      compose(condition_for(ConditionId::E1), make_signals(), make_norms()),
      UsageError);
}

TEST_CASE("compose hits the convex-combination bound under E2") {
  // all three channels at 1: zero net draw, t_out at the setpoint
  const StepSignals s = make_signals(0.0, 0.2, 0.3, 21.0);
  const double r = compose(condition_for(ConditionId::E2), s, make_norms());
  CHECK(r == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("compose for the energy-only condition is the energy channel") {
  const StepSignals s = make_signals(5.0);
  const double r = compose(condition_for(ConditionId::E3), s, make_norms());
  CHECK(r == 0.5);
}

TEST_CASE("E5 at thermal neutrality with saturated energy and grid") {
  // bisect the outdoor temperature that gives PMV = 0 (summer clothing)
  double lo = 20.0, hi = 30.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double pmv =
        comfort::compute_pmv({mid, mid, 0.1, 60.0, 1.2, 0.5}).pmv;
    (pmv < 0.0 ? lo : hi) = mid;
  }
  const double t_neutral = 0.5 * (lo + hi);
  const StepSignals s =
      make_signals(10.0, 0.54, 0.3, t_neutral, 60.0, 7, 12);
  const double r = compose(condition_for(ConditionId::E5), s, make_norms());
  CHECK(r == doctest::Approx(0.2).epsilon(1e-6));
}

TEST_CASE("compose equals the hand-built weighted sum for every condition") {
  Rng rng(99);
  const RewardNormalizers n = make_norms();
  for (int i = 0; i < 300; ++i) {
    StepSignals s = make_signals(
        rng.uniform(-5.0, 40.0), rng.uniform01() < 0.5 ? 0.2 : 0.54,
        rng.uniform(0.1, 0.45), rng.uniform(-5.0, 35.0),
        rng.uniform(20.0, 95.0), 1 + int(rng.uniform_index(12)),
        int(rng.uniform_index(24)));
    for (ConditionId id :
         {ConditionId::E2, ConditionId::E3, ConditionId::E4, ConditionId::E5}) {
      const Condition& c = condition_for(id);
      double rc = 0.0;
      switch (c.comfort_kind) {
        case ComfortKind::none: rc = 0.0; break;
        case ComfortKind::setpoint_deadband:
          rc = comfort_setpoint_deadband(s.t_out, s.setpoint);
          break;
        case ComfortKind::naive_deviation: rc = comfort_naive(s.t_out); break;
        case ComfortKind::pmv:
          rc = comfort::pmv_comfort_reward(
              comfort::compute_pmv({s.t_out, s.t_out, 0.1, s.rh, 1.2,
                                    comfort::clothing_for_month(s.month)})
                  .pmv);
          break;
      }
      const double expected = c.weights->alpha * r_energy(s, n.e_ref) +
                              c.weights->beta * rc +
                              c.weights->gamma * r_grid(s, n);
      const double got = compose(c, s, n);
      CHECK(got == expected);
      CHECK(got >= 0.0);
      CHECK(got <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("E3 reward ignores comfort inputs (metamorphic)") {
  const RewardNormalizers n = make_norms();
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    StepSignals s = make_signals(rng.uniform(0.0, 20.0));
    const double base = compose(condition_for(ConditionId::E3), s, n);
    s.t_out = rng.uniform(-10.0, 40.0);
    s.rh = rng.uniform(0.0, 100.0);
    s.month = 1 + int(rng.uniform_index(12));
    CHECK(compose(condition_for(ConditionId::E3), s, n) == base);
  }
}

TEST_CASE("compose is continuous in outdoor temperature") {
  const RewardNormalizers n = make_norms();
  for (ConditionId id : {ConditionId::E2, ConditionId::E4, ConditionId::E5}) {
    const Condition& c = condition_for(id);
    for (double t = -2.0; t <= 32.0; t += 1.7) {
      StepSignals a = make_signals(5.0, 0.2, 0.3, t, 55.0, 3, 9);
      StepSignals b = a;
      b.t_out = t + 1e-6;
      CHECK(std::abs(compose(c, a, n) - compose(c, b, n)) < 1e-5);
    }
  }
}

TEST_CASE("weights outside [0,1] are rejected") {
  CHECK_THROWS_AS(RewardWeights(1.2, 0.0, 0.0), DomainError);
  CHECK_THROWS_AS(RewardWeights(0.5, -0.1, 0.0), DomainError);
}
