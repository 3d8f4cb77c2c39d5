#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bems/comfort.hpp"
#include "bems/config.hpp"
#include "bems/errors.hpp"
#include "bems/experiment.hpp"
#include "bems/sac.hpp"
#include "bems/serialize.hpp"

namespace {

using namespace bems;

int cmd_generate_data(std::uint64_t seed, int buildings, int horizon,
                      const std::string& out) {
  const env::Dataset d = env::generate_synthetic_dataset(seed, buildings, horizon);
  env::save_dataset(d, out);
  std::cout << "wrote " << d.horizon() << " rows x " << d.num_buildings
            << " buildings to " << out << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, bool desk_preset,
            const std::vector<std::string>& conditions,
            const std::vector<std::uint64_t>& seeds, const std::string& out_dir,
            int workers) {
  harness::ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = harness::load_experiment_config(config_path);
  } else if (desk_preset) {
    cfg = harness::ExperimentConfig::desk_preset();
  } else {
    throw ConfigError("run needs --config FILE or --preset-desk");
  }
  if (!conditions.empty()) {
    cfg.conditions.clear();
    for (const std::string& c : conditions) {
      cfg.conditions.push_back(reward::condition_id_from_string(c));
    }
  }
  if (!seeds.empty()) cfg.seeds = seeds;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (workers >= 0) cfg.workers = workers;

  const harness::ExperimentResult result = harness::run_experiment(cfg);
  std::cout << "run complete; report at " << result.out_dir << "/report.json\n";
  return 0;
}

int cmd_evaluate(const std::string& checkpoint_path, const std::string& data_path) {
  const agent::PolicyCheckpoint ck = agent::load_policy_checkpoint(checkpoint_path);
  auto dataset = std::make_shared<env::Dataset>(env::load_dataset(data_path));
  env::EnvParams params;

  const int expected_obs = 9 + dataset->num_buildings;
  if (ck.policy.input_dim() != expected_obs) {
    throw ConfigError("checkpoint expects observation dim " +
                      std::to_string(ck.policy.input_dim()) + " but dataset yields " +
                      std::to_string(expected_obs));
  }

  env::DistrictEnv env(dataset, params);
  const harness::RolloutSeries series =
      harness::rollout_policy(env, ck.policy, ck.seed);
  const kpi::KpiValues raw = harness::kpis_of(series);

  env::DistrictEnv rbc_env(dataset, params);
  const kpi::KpiValues rbc_raw =
      harness::kpis_of(harness::rollout_rbc(rbc_env, baseline::RbcSchedule{}));
  const kpi::KpiReport report = kpi::ratio_report(raw, rbc_raw);

  auto ratio = [](const std::optional<double>& r) {
    return r ? Json(*r) : Json(nullptr);
  };
  Json out{{"raw",
            {{"cost", raw.cost},
             {"carbon", raw.carbon},
             {"consumption", raw.consumption},
             {"ramping", raw.ramping},
             {"daily_peak", raw.daily_peak}}},
           {"ratios_vs_default_rbc",
            {{"cost", ratio(report.ratios.cost)},
             {"carbon", ratio(report.ratios.carbon)},
             {"consumption", ratio(report.ratios.consumption)},
             {"ramping", ratio(report.ratios.ramping)},
             {"daily_peak", ratio(report.ratios.daily_peak)}}},
           {"seed", ck.seed}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_pmv(double tdb, double tr, double vr, double rh, double met, double clo) {
  const comfort::ComfortInputs in(tdb, tr, vr, rh, met, clo);
  const comfort::PmvResult r = comfort::compute_pmv(in);
  Json out{{"pmv", r.pmv},
           {"ppd", r.ppd},
           {"comfort_reward", comfort::pmv_comfort_reward(r.pmv)},
           {"vapor_pressure_pa", comfort::vapor_pressure(tdb, rh)}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"district battery-dispatch reward-shaping workbench"};
  app.require_subcommand(1);

  // generate-data
  auto* gen = app.add_subcommand("generate-data", "write a synthetic district dataset CSV");
  std::uint64_t gen_seed = 7;
  int gen_buildings = 5;
  int gen_horizon = 8760;
  std::string gen_out;
  gen->add_option("--seed", gen_seed, "dataset RNG seed");
  gen->add_option("--buildings", gen_buildings, "number of buildings");
  gen->add_option("--horizon", gen_horizon, "hourly steps (multiple of 24)");
  gen->add_option("--out", gen_out, "output CSV path")->required();

  // run
  auto* run = app.add_subcommand("run", "run the experiment protocol from a config");
  std::string run_config;
  bool run_desk = false;
  std::vector<std::string> run_conditions;
  std::vector<std::uint64_t> run_seeds;
  std::string run_out;
  int run_workers = -1;
  run->add_option("--config", run_config, "experiment config JSON");
  run->add_flag("--preset-desk", run_desk, "desk-scale preset (8 weeks, 5k steps, 2 seeds)");
  run->add_option("--condition", run_conditions, "restrict to conditions (E1..E5)");
  run->add_option("--seeds", run_seeds, "override seed list")->delimiter(',');
  run->add_option("--out", run_out, "output directory (overrides config)");
  run->add_option("--workers", run_workers, "worker threads (0 = auto)");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "roll out a policy checkpoint on a dataset");
  std::string eval_ck, eval_data;
  eval->add_option("--checkpoint", eval_ck, "policy checkpoint JSON")->required();
  eval->add_option("--data", eval_data, "dataset CSV")->required();

  // report
  auto* rep = app.add_subcommand("report", "rebuild report and plot data from run artifacts");
  std::string rep_runs, rep_out;
  rep->add_option("--runs", rep_runs, "existing run directory")->required();
  rep->add_option("--out", rep_out, "output directory")->required();

  // pmv
  auto* pmv = app.add_subcommand("pmv", "diagnostic PMV/PPD evaluation");
  double p_tdb = 22, p_tr = 22, p_vr = 0.1, p_rh = 50, p_met = 1.2, p_clo = 0.5;
  pmv->add_option("--tdb", p_tdb, "air temperature, degC");
  pmv->add_option("--tr", p_tr, "mean radiant temperature, degC");
  pmv->add_option("--vr", p_vr, "relative air speed, m/s");
  pmv->add_option("--rh", p_rh, "relative humidity, %");
  pmv->add_option("--met", p_met, "metabolic rate, met");
  pmv->add_option("--clo", p_clo, "clothing insulation, clo");

  try {
    app.parse(argc, argv);
    if (gen->parsed()) {
      return cmd_generate_data(gen_seed, gen_buildings, gen_horizon, gen_out);
    }
    if (run->parsed()) {
      return cmd_run(run_config, run_desk, run_conditions, run_seeds, run_out,
                     run_workers);
    }
    if (eval->parsed()) return cmd_evaluate(eval_ck, eval_data);
    if (rep->parsed()) {
      bems::harness::write_report_from_runs(rep_runs, rep_out);
      std::cout << "report written to " << rep_out << "\n";
      return 0;
    }
    if (pmv->parsed()) return cmd_pmv(p_tdb, p_tr, p_vr, p_rh, p_met, p_clo);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical/training failure: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
