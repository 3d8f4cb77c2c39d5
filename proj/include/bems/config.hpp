#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bems/env.hpp"
#include "bems/rbc.hpp"
#include "bems/reward.hpp"
#include "bems/sac.hpp"
#include "bems/serialize.hpp"

namespace bems::harness {

struct DatasetSource {
  enum class Kind { synthetic, file };
  Kind kind = Kind::synthetic;
  std::uint64_t seed = 7;
  int buildings = 5;
  int horizon = 8760;
  std::string path;  // for Kind::file
};

// The full experiment description. Everything here (including defaults)
// is echoed verbatim into the run directory so no hidden state affects
// results.
struct ExperimentConfig {
  int schema_version = 1;
  std::vector<reward::ConditionId> conditions = {
      reward::ConditionId::E1, reward::ConditionId::E2,
      reward::ConditionId::E3, reward::ConditionId::E4,
      reward::ConditionId::E5};
  std::vector<std::uint64_t> seeds = {42, 0, 1, 123, 456};
  int total_steps = 50000;
  DatasetSource dataset;
  env::EnvParams env_params;
  baseline::RbcSchedule rbc;
  agent::SacConfig sac;
  bool force_carbon_fallback = false;
  // Ablation hook; defaults are the registry weights.
  std::map<reward::ConditionId, reward::RewardWeights> weight_overrides;
  std::string out_dir;
  int workers = 0;  // 0 = one per available core, capped at the task count

  void validate() const;

  // Shrunk protocol for smoke runs: 8 weeks, 5k steps, 2 seeds.
  static ExperimentConfig desk_preset();
};

Json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j);

ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& cfg,
                            const std::string& path);

}  // namespace bems::harness
