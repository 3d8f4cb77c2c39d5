#include "bems/config.hpp"

#include <fstream>
#include <set>

#include "bems/errors.hpp"

namespace bems::harness {

void ExperimentConfig::validate() const {
  if (conditions.empty()) throw ConfigError("no conditions selected");
  {
    std::set<reward::ConditionId> seen(conditions.begin(), conditions.end());
    if (seen.size() != conditions.size()) {
      throw ConfigError("duplicate conditions in config");
    }
  }
  if (seeds.empty()) throw ConfigError("seeds must be non-empty");
  {
    std::set<std::uint64_t> seen(seeds.begin(), seeds.end());
    if (seen.size() != seeds.size()) throw ConfigError("seeds must be distinct");
  }
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (dataset.kind == DatasetSource::Kind::synthetic) {
    if (dataset.buildings < 1) throw ConfigError("buildings must be >= 1");
    if (dataset.horizon < 24 || dataset.horizon % 24 != 0) {
      throw ConfigError("horizon must be a positive whole number of days");
    }
  } else if (dataset.path.empty()) {
    throw ConfigError("dataset.path required for a file source");
  }
  env_params.validate();
  rbc.validate();
  agent::SacConfig effective = sac;
  effective.total_steps = total_steps;
  effective.validate();
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

ExperimentConfig ExperimentConfig::desk_preset() {
  ExperimentConfig cfg;
  cfg.seeds = {42, 0};
  cfg.total_steps = 5000;
  cfg.dataset.horizon = 1344;  // 8 weeks
  return cfg;
}

namespace {

Json battery_to_json(const env::BatteryParams& b) {
  return Json{{"capacity_kwh", b.capacity_kwh},
              {"nominal_power_kw", b.nominal_power_kw},
              {"charge_efficiency", b.charge_efficiency},
              {"discharge_efficiency", b.discharge_efficiency}};
}

env::BatteryParams battery_from_json(const Json& j) {
  env::BatteryParams b;
  b.capacity_kwh = j.value("capacity_kwh", b.capacity_kwh);
  b.nominal_power_kw = j.value("nominal_power_kw", b.nominal_power_kw);
  b.charge_efficiency = j.value("charge_efficiency", b.charge_efficiency);
  b.discharge_efficiency = j.value("discharge_efficiency", b.discharge_efficiency);
  return b;
}

}  // namespace

Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["schema_version"] = cfg.schema_version;
  {
    std::vector<std::string> conds;
    for (auto id : cfg.conditions) conds.push_back(reward::to_string(id));
    j["conditions"] = conds;
  }
  j["seeds"] = cfg.seeds;
  j["total_steps"] = cfg.total_steps;
  j["dataset"] = Json{
      {"source",
       cfg.dataset.kind == DatasetSource::Kind::synthetic ? "synthetic" : "file"},
      {"seed", cfg.dataset.seed},
      {"buildings", cfg.dataset.buildings},
      {"horizon", cfg.dataset.horizon},
      {"path", cfg.dataset.path}};
  j["env"] = Json{{"battery", battery_to_json(cfg.env_params.battery)},
                  {"initial_soc_fraction", cfg.env_params.initial_soc_fraction}};
  j["rbc"] = Json{{"charge_hours", cfg.rbc.charge_hours},
                  {"discharge_hours", cfg.rbc.discharge_hours},
                  {"charge_rate", cfg.rbc.charge_rate},
                  {"discharge_rate", cfg.rbc.discharge_rate}};
  j["sac"] = agent::sac_config_to_json(cfg.sac);
  Json overrides = Json::object();
  for (const auto& [id, w] : cfg.weight_overrides) {
    overrides[reward::to_string(id)] =
        Json{{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}};
  }
  j["reward"] = Json{{"force_carbon_fallback", cfg.force_carbon_fallback},
                     {"weight_overrides", overrides}};
  j["out_dir"] = cfg.out_dir;
  j["workers"] = cfg.workers;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j) {
  ExperimentConfig cfg;
  cfg.schema_version = j.value("schema_version", 1);
  if (cfg.schema_version != 1) {
    throw ConfigError("unsupported config schema_version " +
                      std::to_string(cfg.schema_version));
  }
  if (j.contains("conditions")) {
    cfg.conditions.clear();
    for (const auto& s : j.at("conditions")) {
      cfg.conditions.push_back(
          reward::condition_id_from_string(s.get<std::string>()));
    }
  }
  if (j.contains("seeds")) {
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  }
  cfg.total_steps = j.value("total_steps", cfg.total_steps);
  if (j.contains("dataset")) {
    const Json& d = j.at("dataset");
    const std::string source = d.value("source", "synthetic");
    if (source == "synthetic") {
      cfg.dataset.kind = DatasetSource::Kind::synthetic;
    } else if (source == "file") {
      cfg.dataset.kind = DatasetSource::Kind::file;
    } else {
      throw ConfigError("dataset.source must be 'synthetic' or 'file'");
    }
    cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
    cfg.dataset.buildings = d.value("buildings", cfg.dataset.buildings);
    cfg.dataset.horizon = d.value("horizon", cfg.dataset.horizon);
    cfg.dataset.path = d.value("path", cfg.dataset.path);
  }
  if (j.contains("env")) {
    const Json& e = j.at("env");
    if (e.contains("battery")) {
      cfg.env_params.battery = battery_from_json(e.at("battery"));
    }
    cfg.env_params.initial_soc_fraction =
        e.value("initial_soc_fraction", cfg.env_params.initial_soc_fraction);
  }
  if (j.contains("rbc")) {
    const Json& r = j.at("rbc");
    cfg.rbc.charge_hours = r.value("charge_hours", cfg.rbc.charge_hours);
    cfg.rbc.discharge_hours = r.value("discharge_hours", cfg.rbc.discharge_hours);
    cfg.rbc.charge_rate = r.value("charge_rate", cfg.rbc.charge_rate);
    cfg.rbc.discharge_rate = r.value("discharge_rate", cfg.rbc.discharge_rate);
  }
  if (j.contains("sac")) cfg.sac = agent::sac_config_from_json(j.at("sac"));
  if (j.contains("reward")) {
    const Json& r = j.at("reward");
    cfg.force_carbon_fallback =
        r.value("force_carbon_fallback", cfg.force_carbon_fallback);
    if (r.contains("weight_overrides")) {
      for (const auto& [key, val] : r.at("weight_overrides").items()) {
        cfg.weight_overrides.emplace(
            reward::condition_id_from_string(key),
            reward::RewardWeights(val.at("alpha").get<double>(),
                                  val.at("beta").get<double>(),
                                  val.at("gamma").get<double>()));
      }
    }
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.workers = j.value("workers", cfg.workers);
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config '" + path + "': " + e.what());
  }
  return experiment_config_from_json(j);
}

void save_experiment_config(const ExperimentConfig& cfg,
                            const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << experiment_config_to_json(cfg).dump(2) << "\n";
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace bems::harness
