#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bems::reward {

struct RewardWeights {
  double alpha;  // energy
  double beta;   // comfort
  double gamma;  // grid

  RewardWeights(double alpha, double beta, double gamma);
};

enum class ComfortKind { none, setpoint_deadband, naive_deviation, pmv };

enum class ConditionId { E1, E2, E3, E4, E5 };

std::string to_string(ConditionId id);
ConditionId condition_id_from_string(const std::string& s);

struct Condition {
  ConditionId id;
  std::string name;
  std::optional<RewardWeights> weights;  // absent for E1 (rule-based)
  ComfortKind comfort_kind;
};

// Raw per-timestep quantities from which any condition's reward is
// composed. net_energy may be negative with excess solar.
struct StepSignals {
  double net_energy;        // district net electricity, kWh
  double price;             // currency/kWh
  double carbon_intensity;  // kgCO2/kWh
  double t_out;             // outdoor dry-bulb, degC
  double rh;                // %
  int month;                // 1..12
  int hour;                 // 0..23
  double setpoint;          // indoor temperature setpoint, degC
  bool pricing_available;   // row-level dataset flag
};

// Channel normalizers, computed once from the dataset and frozen for the
// whole experiment.
struct RewardNormalizers {
  double e_ref;        // reference district draw, kWh; > 0
  double price_max;    // > 0
  double carbon_max;   // > 0
  bool force_carbon_fallback = false;  // testing switch for the grid channel
};

// 1 - min(max(net, 0)/e_ref, 1): 1 at zero draw or export, 0 at/above e_ref.
double r_energy(const StepSignals& s, double e_ref);

// Price-weighted consumption penalty; falls back to carbon intensity when
// the row flags pricing unavailable (or the fallback switch is set).
double r_grid(const StepSignals& s, const RewardNormalizers& n);

// Deadband comfort: no penalty within +-halfwidth of the setpoint, then
// linear to zero over span degrees of excess.
double comfort_setpoint_deadband(double t, double setpoint,
                                 double halfwidth = 1.0, double span = 5.0);

// max(0, 1 - |t - 21| / 5): fixed 21 degC anchor, 5 degC span.
double comfort_naive(double t);

// Weighted composition alpha*r_energy + beta*r_comfort + gamma*r_grid.
// The comfort channel dispatches on comfort_kind; PMV uses the outdoor
// dry-bulb as both air and radiant temperature (vr = 0.1 m/s, met = 1.2,
// clo from the month). Throws UsageError for E1.
double compose(const Condition& c, const StepSignals& s,
               const RewardNormalizers& n);

// The five experimental conditions with their fixed weights.
const std::vector<Condition>& condition_registry();
const Condition& condition_for(ConditionId id);

}  // namespace bems::reward
