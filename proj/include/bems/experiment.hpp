#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bems/config.hpp"
#include "bems/kpi.hpp"
#include "bems/mlp.hpp"

namespace bems::harness {

struct SeedRun {
  std::uint64_t seed = 0;
  kpi::KpiReport report;
};

struct ConditionRuns {
  reward::ConditionId id;
  std::vector<SeedRun> seeds;  // empty for E1
  std::optional<kpi::KpiAggregate> aggregate;
};

struct ExperimentResult {
  kpi::KpiValues rbc_raw;
  std::vector<ConditionRuns> conditions;
  std::string out_dir;
};

// Runs the configured conditions: a deterministic RBC rollout anchors the
// ratios, each learned condition trains per seed (workers in parallel,
// one env/agent/rng triple each), evaluates the deterministic policy over
// one full horizon and writes artifacts:
//   config_echo.json, metadata.json (timestamps live only here),
//   dataset.csv, rbc_reference.json, E*/seed_*/{train_log.csv,
//   policy.json, kpis.json}, E*/aggregate.json, E1/kpis.json,
//   report.json and plots/*.csv.
// A failing (condition, seed) pair does not abort the rest; failures are
// re-thrown afterwards with their context, partial artifacts preserved.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Rebuilds report.json and the plot files from an existing run directory.
// Missing artifacts raise ConfigError listing the absent (condition, seed)
// pairs.
void write_report_from_runs(const std::string& runs_dir,
                            const std::string& out_dir);

struct RolloutSeries {
  std::vector<double> net_energy, price, carbon;
};

RolloutSeries rollout_rbc(env::DistrictEnv& env,
                          const baseline::RbcSchedule& schedule);
RolloutSeries rollout_policy(env::DistrictEnv& env, const agent::Mlp& policy,
                             std::uint64_t reset_seed);
kpi::KpiValues kpis_of(const RolloutSeries& series);

// Plot-data file 4: per-month mean PMV and comfort reward of the dataset
// under the PMV comfort channel (outdoor proxy, monthly clothing).
struct MonthlyComfortRow {
  int month;
  double mean_pmv;
  double mean_comfort_reward;
};
std::vector<MonthlyComfortRow> monthly_comfort_profile(const env::Dataset& d);

}  // namespace bems::harness
