#include "bems/reward.hpp"

#include <algorithm>
#include <cmath>

#include "bems/comfort.hpp"
#include "bems/errors.hpp"

namespace bems::reward {

RewardWeights::RewardWeights(double alpha_, double beta_, double gamma_)
    : alpha(alpha_), beta(beta_), gamma(gamma_) {
  for (double w : {alpha, beta, gamma}) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      throw DomainError("reward weight outside [0, 1]");
    }
  }
}

std::string to_string(ConditionId id) {
  switch (id) {
    case ConditionId::E1: return "E1";
    case ConditionId::E2: return "E2";
    case ConditionId::E3: return "E3";
    case ConditionId::E4: return "E4";
    case ConditionId::E5: return "E5";
  }
  throw UsageError("unknown condition id");
}

ConditionId condition_id_from_string(const std::string& s) {
  if (s == "E1") return ConditionId::E1;
  if (s == "E2") return ConditionId::E2;
  if (s == "E3") return ConditionId::E3;
  if (s == "E4") return ConditionId::E4;
  if (s == "E5") return ConditionId::E5;
  throw ConfigError("unknown condition id '" + s + "' (expected E1..E5)");
}

double r_energy(const StepSignals& s, double e_ref) {
  if (!(e_ref > 0.0)) throw ConfigError("e_ref must be > 0");
  const double draw = std::max(s.net_energy, 0.0);
  return 1.0 - std::min(draw / e_ref, 1.0);
}

double r_grid(const StepSignals& s, const RewardNormalizers& n) {
  if (!(n.e_ref > 0.0)) throw ConfigError("e_ref must be > 0");
  if (!(n.price_max > 0.0)) throw ConfigError("price_max must be > 0");
  if (!(n.carbon_max > 0.0)) throw ConfigError("carbon_max must be > 0");
  const bool use_price = s.pricing_available && !n.force_carbon_fallback;
  const double factor = use_price ? s.price / n.price_max
                                  : s.carbon_intensity / n.carbon_max;
  const double draw = std::max(s.net_energy, 0.0);
  return 1.0 - std::min(factor * draw / n.e_ref, 1.0);
}

double comfort_setpoint_deadband(double t, double setpoint, double halfwidth,
                                 double span) {
  if (!std::isfinite(t) || !std::isfinite(setpoint)) {
    throw DomainError("temperature inputs must be finite");
  }
  const double excess = std::max(0.0, std::abs(t - setpoint) - halfwidth);
  return std::max(0.0, 1.0 - excess / span);
}

double comfort_naive(double t) {
  if (!std::isfinite(t)) throw DomainError("t must be finite");
  return std::max(0.0, 1.0 - std::abs(t - 21.0) / 5.0);
}

double compose(const Condition& c, const StepSignals& s,
               const RewardNormalizers& n) {
  if (c.id == ConditionId::E1 || !c.weights) {
    throw UsageError("E1 is rule-based and has no shaped reward");
  }
  const RewardWeights& w = *c.weights;
  const double re = r_energy(s, n.e_ref);
  const double rg = r_grid(s, n);

  double rc = 0.0;
  switch (c.comfort_kind) {
    case ComfortKind::none:
      break;  // beta = 0, channel not evaluated
    case ComfortKind::setpoint_deadband:
      rc = comfort_setpoint_deadband(s.t_out, s.setpoint);
      break;
    case ComfortKind::naive_deviation:
      rc = comfort_naive(s.t_out);
      break;
    case ComfortKind::pmv: {
      // Outdoor dry-bulb stands in for both air and radiant temperature,
      // applied identically for every learned condition.
      const comfort::ComfortInputs in(s.t_out, s.t_out, 0.1, s.rh, 1.2,
                                      comfort::clothing_for_month(s.month));
      rc = comfort::pmv_comfort_reward(comfort::compute_pmv(in).pmv);
      break;
    }
  }
  return w.alpha * re + w.beta * rc + w.gamma * rg;
}

const std::vector<Condition>& condition_registry() {
  static const std::vector<Condition> kRegistry = {
      {ConditionId::E1, "RBC", std::nullopt, ComfortKind::none},
      {ConditionId::E2, "Manual", RewardWeights(0.60, 0.20, 0.20),
       ComfortKind::setpoint_deadband},
      {ConditionId::E3, "Energy-Only", RewardWeights(1.00, 0.00, 0.00),
       ComfortKind::none},
      {ConditionId::E4, "Naive-Comfort", RewardWeights(0.70, 0.20, 0.10),
       ComfortKind::naive_deviation},
      {ConditionId::E5, "PMV", RewardWeights(0.60, 0.20, 0.20),
       ComfortKind::pmv},
  };
  return kRegistry;
}

const Condition& condition_for(ConditionId id) {
  for (const Condition& c : condition_registry()) {
    if (c.id == id) return c;
  }
  throw UsageError("condition not in registry");
}

}  // namespace bems::reward
