#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bems/env.hpp"
#include "bems/mlp.hpp"
#include "bems/replay.hpp"
#include "bems/reward.hpp"
#include "bems/rng.hpp"

namespace bems::agent {

struct SacConfig {
  double learning_rate = 3e-4;
  int buffer_capacity = 100000;
  int batch_size = 256;
  double discount = 0.99;
  double soft_update_tau = 0.005;
  std::vector<int> hidden = {256, 256};
  int total_steps = 50000;
  int warmup_steps = 1000;       // uniform-random action steps
  int update_interval = 1;       // gradient updates per env step
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  double tanh_eps = 1e-6;        // guard inside the tanh log-det term
  bool auto_entropy = true;      // target entropy = -action_dim
  double init_alpha = 1.0;

  void validate() const;
};

// Log density of a squashed-Gaussian action: Gaussian in pre-tanh space
// plus the tanh change-of-variables correction. Shared by the sampling
// path, the update graphs and the tests.
double squashed_log_prob(const Eigen::RowVectorXd& mean,
                         const Eigen::RowVectorXd& log_std,
                         const Eigen::RowVectorXd& pre_tanh, double tanh_eps);

struct PolicySample {
  std::vector<double> action;  // in [-1, 1]^A
  double log_prob;
};

// One stochastic draw through the policy head: clamped log-std,
// reparameterized noise from rng, tanh squashing.
PolicySample policy_sample(const Mlp& policy,
                           const std::vector<double>& observation, Rng& rng,
                           const SacConfig& cfg);

// Evaluation-mode action: tanh of the mean head, no sampling.
std::vector<double> policy_mean_action(const Mlp& policy,
                                       const std::vector<double>& observation);

struct UpdateDiagnostics {
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double policy_loss = 0.0;
  double alpha = 0.0;
  double entropy = 0.0;  // -mean log-prob of the fresh policy sample
};

// Adam with standard decay constants; one instance per parameter group.
class Adam {
 public:
  explicit Adam(double lr) : lr_(lr) {}
  void step(const std::vector<Eigen::MatrixXd*>& params,
            const std::vector<Eigen::MatrixXd>& grads);

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999, eps_ = 1e-8;
  long long t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

// Twin-Q soft actor-critic with automatic entropy tuning. One instance is
// single-threaded; run one agent per seed worker.
class SacAgent {
 public:
  SacAgent(int obs_dim, int act_dim, const SacConfig& cfg, std::uint64_t seed);

  std::vector<double> random_action();
  PolicySample stochastic_action(const std::vector<double>& obs);
  std::vector<double> deterministic_action(const std::vector<double>& obs) const;

  void push_transition(const std::vector<double>& obs,
                       const std::vector<double>& act, double rew,
                       const std::vector<double>& next_obs, bool done);

  bool can_update() const { return buffer_.size() >= cfg_.batch_size; }
  UpdateDiagnostics update();
  void soft_update_targets(double tau);

  const Mlp& policy() const { return policy_; }
  const Mlp& q1() const { return q1_; }
  const Mlp& q2() const { return q2_; }
  const Mlp& q1_target() const { return q1t_; }
  const Mlp& q2_target() const { return q2t_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  double alpha() const;
  double log_alpha() const { return log_alpha_(0, 0); }
  double target_entropy() const { return target_entropy_; }
  const SacConfig& config() const { return cfg_; }
  int act_dim() const { return act_dim_; }
  int obs_dim() const { return obs_dim_; }

 private:
  int obs_dim_, act_dim_;
  SacConfig cfg_;
  Rng rng_;
  Mlp policy_, q1_, q2_, q1t_, q2t_;
  Eigen::MatrixXd log_alpha_;  // 1x1, optimized on log scale
  double target_entropy_;
  Adam opt_policy_, opt_q_, opt_alpha_;
  ReplayBuffer buffer_;
};

struct StepLog {
  int step = 0;
  double reward = 0.0;
  bool updated = false;
  UpdateDiagnostics diag;
};

struct TrainResult {
  Mlp policy;
  SacConfig config;
  std::vector<StepLog> log;
};

// The experimental training loop: warmup with uniform-random actions, then
// one environment step and one gradient update per step, rewards composed
// from the condition's channels, episodes rolling over seamlessly at the
// horizon. Fully deterministic for a fixed (condition, dataset, config,
// seed).
TrainResult train(const reward::Condition& condition, env::DistrictEnv& env,
                  const reward::RewardNormalizers& normalizers,
                  const SacConfig& cfg, std::uint64_t seed);

// Self-describing policy container: layer sizes, 64-bit parameters, config
// echo and seed. Save/load round-trips bit-exactly.
struct PolicyCheckpoint {
  Mlp policy;
  SacConfig config;
  std::uint64_t seed = 0;
};

void save_policy_checkpoint(const std::string& path, const Mlp& policy,
                            const SacConfig& cfg, std::uint64_t seed);
PolicyCheckpoint load_policy_checkpoint(const std::string& path);

}  // namespace bems::agent
