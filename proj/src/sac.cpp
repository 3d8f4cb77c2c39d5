#include "bems/sac.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bems/autodiff.hpp"
#include "bems/errors.hpp"
#include "bems/serialize.hpp"

namespace bems::agent {

namespace {
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // 0.5*log(2*pi)

Eigen::RowVectorXd to_row(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::RowVectorXd>(v.data(),
                                              static_cast<long>(v.size()));
}

std::vector<double> to_vec(const Eigen::RowVectorXd& r) {
  return std::vector<double>(r.data(), r.data() + r.size());
}
}  // namespace

void SacConfig::validate() const {
  if (!(learning_rate >= 0.0)) throw ConfigError("learning_rate must be >= 0");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (batch_size > buffer_capacity) {
    throw ConfigError("batch_size exceeds buffer_capacity");
  }
  if (!(discount > 0.0 && discount < 1.0)) {
    throw ConfigError("discount must be in (0, 1)");
  }
  if (!(soft_update_tau > 0.0 && soft_update_tau <= 1.0)) {
    throw ConfigError("soft_update_tau must be in (0, 1]");
  }
  if (hidden.empty()) throw ConfigError("at least one hidden layer required");
  for (int h : hidden) {
    if (h < 1) throw ConfigError("hidden sizes must be positive");
  }
  if (total_steps < 1) throw ConfigError("total_steps must be >= 1");
  if (warmup_steps < 0) throw ConfigError("warmup_steps must be >= 0");
  if (update_interval < 1) throw ConfigError("update_interval must be >= 1");
  if (!(log_std_min < log_std_max)) {
    throw ConfigError("log_std bounds out of order");
  }
  if (!(tanh_eps > 0.0)) throw ConfigError("tanh_eps must be > 0");
  if (!(init_alpha > 0.0)) throw ConfigError("init_alpha must be > 0");
}

double squashed_log_prob(const Eigen::RowVectorXd& mean,
                         const Eigen::RowVectorXd& log_std,
                         const Eigen::RowVectorXd& pre_tanh, double tanh_eps) {
  double lp = 0.0;
  for (long i = 0; i < mean.size(); ++i) {
    const double sd = std::exp(log_std(i));
    const double z = (pre_tanh(i) - mean(i)) / sd;
    lp += -0.5 * z * z - log_std(i) - kLogSqrt2Pi;
    const double a = std::tanh(pre_tanh(i));
    lp -= std::log(1.0 - a * a + tanh_eps);
  }
  return lp;
}

PolicySample policy_sample(const Mlp& policy,
                           const std::vector<double>& observation, Rng& rng,
                           const SacConfig& cfg) {
  const long act_dim = policy.output_dim() / 2;
  Eigen::MatrixXd x = to_row(observation);
  const Eigen::MatrixXd out = policy.forward(x);
  Eigen::RowVectorXd mean = out.leftCols(act_dim);
  Eigen::RowVectorXd log_std = out.rightCols(act_dim)
                                   .cwiseMax(cfg.log_std_min)
                                   .cwiseMin(cfg.log_std_max);
  Eigen::RowVectorXd u(act_dim);
  for (long i = 0; i < act_dim; ++i) {
    u(i) = mean(i) + std::exp(log_std(i)) * rng.normal();
  }
  PolicySample s;
  s.action.resize(act_dim);
  for (long i = 0; i < act_dim; ++i) s.action[i] = std::tanh(u(i));
  s.log_prob = squashed_log_prob(mean, log_std, u, cfg.tanh_eps);
  return s;
}

std::vector<double> policy_mean_action(
    const Mlp& policy, const std::vector<double>& observation) {
  const long act_dim = policy.output_dim() / 2;
  Eigen::MatrixXd x = to_row(observation);
  const Eigen::MatrixXd out = policy.forward(x);
  std::vector<double> a(act_dim);
  for (long i = 0; i < act_dim; ++i) a[i] = std::tanh(out(0, i));
  return a;
}

void Adam::step(const std::vector<Eigen::MatrixXd*>& params,
                const std::vector<Eigen::MatrixXd>& grads) {
  if (params.size() != grads.size()) throw UsageError("Adam: group mismatch");
  if (m_.empty()) {
    for (const auto* p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
    v_[i] = (beta2_ * v_[i].array() +
             (1.0 - beta2_) * grads[i].array().square())
                .matrix();
    const auto m_hat = m_[i].array() / bc1;
    const auto v_hat = v_[i].array() / bc2;
    params[i]->array() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
  }
}

SacAgent::SacAgent(int obs_dim, int act_dim, const SacConfig& cfg,
                   std::uint64_t seed)
    : obs_dim_(obs_dim),
      act_dim_(act_dim),
      cfg_(cfg),
      rng_(seed),
      policy_(Mlp()),
      q1_(Mlp()),
      q2_(Mlp()),
      q1t_(Mlp()),
      q2t_(Mlp()),
      target_entropy_(-static_cast<double>(act_dim)),
      opt_policy_(cfg.learning_rate),
      opt_q_(cfg.learning_rate),
      opt_alpha_(cfg.learning_rate),
      buffer_(cfg.buffer_capacity, obs_dim, act_dim) {
  cfg_.validate();
  if (obs_dim < 1 || act_dim < 1) throw UsageError("bad agent dimensions");

  std::vector<int> pol_sizes = {obs_dim};
  std::vector<int> q_sizes = {obs_dim + act_dim};
  for (int h : cfg_.hidden) {
    pol_sizes.push_back(h);
    q_sizes.push_back(h);
  }
  pol_sizes.push_back(2 * act_dim);
  q_sizes.push_back(1);

  policy_ = Mlp::make(pol_sizes, rng_, 1e-2);
  q1_ = Mlp::make(q_sizes, rng_);
  q2_ = Mlp::make(q_sizes, rng_);
  q1t_ = q1_;
  q2t_ = q2_;
  log_alpha_ = Eigen::MatrixXd::Constant(1, 1, std::log(cfg_.init_alpha));
}

double SacAgent::alpha() const { return std::exp(log_alpha_(0, 0)); }

std::vector<double> SacAgent::random_action() {
  std::vector<double> a(act_dim_);
  for (int i = 0; i < act_dim_; ++i) a[i] = rng_.uniform(-1.0, 1.0);
  return a;
}

PolicySample SacAgent::stochastic_action(const std::vector<double>& obs) {
  return policy_sample(policy_, obs, rng_, cfg_);
}

std::vector<double> SacAgent::deterministic_action(
    const std::vector<double>& obs) const {
  return policy_mean_action(policy_, obs);
}

void SacAgent::push_transition(const std::vector<double>& obs,
                               const std::vector<double>& act, double rew,
                               const std::vector<double>& next_obs,
                               bool done) {
  buffer_.push(to_row(obs), to_row(act), rew, to_row(next_obs), done);
}

void SacAgent::soft_update_targets(double tau) {
  auto blend = [tau](Mlp& target, const Mlp& online) {
    for (std::size_t l = 0; l < online.weights.size(); ++l) {
      target.weights[l] = (1.0 - tau) * target.weights[l] + tau * online.weights[l];
      target.biases[l] = (1.0 - tau) * target.biases[l] + tau * online.biases[l];
    }
  };
  blend(q1t_, q1_);
  blend(q2t_, q2_);
}

UpdateDiagnostics SacAgent::update() {
  if (!can_update()) throw UsageError("update before buffer reaches batch size");
  using autodiff::Tape;
  const int n = cfg_.batch_size;
  const int a_dim = act_dim_;

  ReplayBuffer::Batch batch = buffer_.sample(n, rng_);

  Eigen::MatrixXd noise_next(n, a_dim), noise_pol(n, a_dim);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < a_dim; ++c) noise_next(r, c) = rng_.normal();
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < a_dim; ++c) noise_pol(r, c) = rng_.normal();
  }

  // --- targets (no gradients) ---
  Eigen::VectorXd y(n);
  {
    const Eigen::MatrixXd out = policy_.forward(batch.next_obs);
    const Eigen::MatrixXd mean = out.leftCols(a_dim);
    const Eigen::MatrixXd log_std = out.rightCols(a_dim)
                                        .cwiseMax(cfg_.log_std_min)
                                        .cwiseMin(cfg_.log_std_max);
    const Eigen::MatrixXd u =
        mean.array() + log_std.array().exp() * noise_next.array();
    const Eigen::MatrixXd a_next = u.array().tanh();
    // z = noise exactly under reparameterization
    const Eigen::VectorXd logp_gauss =
        (-0.5 * noise_next.array().square() - log_std.array() - kLogSqrt2Pi)
            .rowwise()
            .sum();
    const Eigen::VectorXd logp_corr =
        (1.0 - a_next.array().square() + cfg_.tanh_eps).log().rowwise().sum();
    const Eigen::VectorXd logp = logp_gauss - logp_corr;

    Eigen::MatrixXd qin(n, obs_dim_ + a_dim);
    qin << batch.next_obs, a_next;
    const Eigen::VectorXd q1v = q1t_.forward(qin).col(0);
    const Eigen::VectorXd q2v = q2t_.forward(qin).col(0);
    const Eigen::VectorXd qmin =
        q1v.cwiseMin(q2v) - alpha() * logp;
    y = batch.rew.array() +
        cfg_.discount * (1.0 - batch.done.array()) * qmin.array();
  }

  UpdateDiagnostics diag;

  // --- critic step ---
  {
    Tape t;
    const int obs_n = t.input(batch.obs);
    const int act_n = t.input(batch.act);
    const int y_n = t.input(y);
    const std::vector<int> q1p = q1_.tape_params(t, true);
    const std::vector<int> q2p = q2_.tape_params(t, true);
    const int qin = t.concat_cols(obs_n, act_n);
    const int q1o = q1_.tape_forward(t, qin, q1p);
    const int q2o = q2_.tape_forward(t, qin, q2p);
    const int l1 = t.mean_all(t.square(t.sub(q1o, y_n)));
    const int l2 = t.mean_all(t.square(t.sub(q2o, y_n)));
    const int loss = t.add(l1, l2);
    t.backward(loss);
    diag.q1_loss = t.value(l1)(0, 0);
    diag.q2_loss = t.value(l2)(0, 0);

    std::vector<Eigen::MatrixXd*> params = q1_.params();
    for (auto* p : q2_.params()) params.push_back(p);
    std::vector<Eigen::MatrixXd> grads;
    grads.reserve(params.size());
    for (int id : q1p) grads.push_back(t.gradient(id));
    for (int id : q2p) grads.push_back(t.gradient(id));
    opt_q_.step(params, grads);
  }

  // --- actor step (critic parameters frozen) ---
  double mean_logp = 0.0;
  {
    Tape t;
    const int x = t.input(batch.obs);
    const std::vector<int> pp = policy_.tape_params(t, true);
    const std::vector<int> q1p = q1_.tape_params(t, false);
    const std::vector<int> q2p = q2_.tape_params(t, false);
    const int out = policy_.tape_forward(t, x, pp);
    const int mean = t.slice_cols(out, 0, a_dim);
    const int log_std =
        t.clamp(t.slice_cols(out, a_dim, a_dim), cfg_.log_std_min,
                cfg_.log_std_max);
    const int sd = t.exp(log_std);
    const int eps_n = t.input(noise_pol);
    const int u = t.add(mean, t.mul(sd, eps_n));
    const int act = t.tanh(u);
    const int z = t.div(t.sub(u, mean), sd);
    const int lp_gauss = t.add_scalar(
        t.sub(t.mul_scalar(t.square(z), -0.5), log_std), -kLogSqrt2Pi);
    const int corr = t.log(
        t.add_scalar(t.mul_scalar(t.square(act), -1.0), 1.0 + cfg_.tanh_eps));
    const int logp = t.row_sum(t.sub(lp_gauss, corr));
    const int qin = t.concat_cols(x, act);
    const int q1o = q1_.tape_forward(t, qin, q1p);
    const int q2o = q2_.tape_forward(t, qin, q2p);
    const int qmin = t.min(q1o, q2o);
    const int loss = t.mean_all(t.sub(t.mul_scalar(logp, alpha()), qmin));
    t.backward(loss);
    diag.policy_loss = t.value(loss)(0, 0);
    mean_logp = t.value(logp).mean();

    std::vector<Eigen::MatrixXd> grads;
    grads.reserve(pp.size());
    for (int id : pp) grads.push_back(t.gradient(id));
    opt_policy_.step(policy_.params(), grads);
  }
  diag.entropy = -mean_logp;

  // --- temperature step on log(alpha): gradient descent toward the
  //     target entropy, -(mean log-prob + target) ---
  if (cfg_.auto_entropy) {
    Eigen::MatrixXd g =
        Eigen::MatrixXd::Constant(1, 1, -(mean_logp + target_entropy_));
    opt_alpha_.step({&log_alpha_}, {g});
  }
  diag.alpha = alpha();

  soft_update_targets(cfg_.soft_update_tau);

  if (!std::isfinite(diag.q1_loss) || !std::isfinite(diag.q2_loss) ||
      !std::isfinite(diag.policy_loss) || !policy_.all_finite() ||
      !q1_.all_finite() || !q2_.all_finite() ||
      !std::isfinite(log_alpha_(0, 0))) {
    std::ostringstream os;
    os << "non-finite training state: q1_loss=" << diag.q1_loss
       << " q2_loss=" << diag.q2_loss << " policy_loss=" << diag.policy_loss
       << " alpha=" << diag.alpha << " entropy=" << diag.entropy;
    throw NumericalError(os.str());
  }
  return diag;
}

TrainResult train(const reward::Condition& condition, env::DistrictEnv& env,
                  const reward::RewardNormalizers& normalizers,
                  const SacConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (condition.id == reward::ConditionId::E1) {
    throw UsageError("E1 is rule-based; nothing to train");
  }

  SacAgent agent(env.observation_dim(), env.num_buildings(), cfg, seed);
  std::vector<double> obs = env.reset(seed);

  TrainResult result;
  result.config = cfg;
  result.log.reserve(cfg.total_steps);

  for (int step = 0; step < cfg.total_steps; ++step) {
    std::vector<double> action;
    if (step < cfg.warmup_steps) {
      action = agent.random_action();
    } else {
      action = agent.stochastic_action(obs).action;
    }
    env::StepResult sr = env.step(action);
    const double rew = reward::compose(condition, sr.signals, normalizers);
    agent.push_transition(obs, action, rew, sr.observation, sr.done);

    StepLog sl;
    sl.step = step;
    sl.reward = rew;
    if (step >= cfg.warmup_steps && agent.can_update() &&
        (step - cfg.warmup_steps) % cfg.update_interval == 0) {
      sl.diag = agent.update();
      sl.updated = true;
    }
    result.log.push_back(sl);

    obs = sr.done ? env.reset(seed) : sr.observation;
  }
  result.policy = agent.policy();
  return result;
}

Json sac_config_to_json(const SacConfig& cfg) {
  return Json{{"learning_rate", cfg.learning_rate},
              {"buffer_capacity", cfg.buffer_capacity},
              {"batch_size", cfg.batch_size},
              {"discount", cfg.discount},
              {"soft_update_tau", cfg.soft_update_tau},
              {"hidden", cfg.hidden},
              {"total_steps", cfg.total_steps},
              {"warmup_steps", cfg.warmup_steps},
              {"update_interval", cfg.update_interval},
              {"log_std_min", cfg.log_std_min},
              {"log_std_max", cfg.log_std_max},
              {"tanh_eps", cfg.tanh_eps},
              {"auto_entropy", cfg.auto_entropy},
              {"init_alpha", cfg.init_alpha}};
}

SacConfig sac_config_from_json(const Json& j) {
  SacConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.buffer_capacity = j.value("buffer_capacity", cfg.buffer_capacity);
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.discount = j.value("discount", cfg.discount);
  cfg.soft_update_tau = j.value("soft_update_tau", cfg.soft_update_tau);
  cfg.hidden = j.value("hidden", cfg.hidden);
  cfg.total_steps = j.value("total_steps", cfg.total_steps);
  cfg.warmup_steps = j.value("warmup_steps", cfg.warmup_steps);
  cfg.update_interval = j.value("update_interval", cfg.update_interval);
  cfg.log_std_min = j.value("log_std_min", cfg.log_std_min);
  cfg.log_std_max = j.value("log_std_max", cfg.log_std_max);
  cfg.tanh_eps = j.value("tanh_eps", cfg.tanh_eps);
  cfg.auto_entropy = j.value("auto_entropy", cfg.auto_entropy);
  cfg.init_alpha = j.value("init_alpha", cfg.init_alpha);
  cfg.validate();
  return cfg;
}

void save_policy_checkpoint(const std::string& path, const Mlp& policy,
                            const SacConfig& cfg, std::uint64_t seed) {
  Json j;
  j["schema_version"] = 1;
  j["kind"] = "policy_checkpoint";
  j["seed"] = seed;
  j["layer_sizes"] = policy.sizes;
  Json weights = Json::array();
  Json biases = Json::array();
  for (std::size_t l = 0; l < policy.weights.size(); ++l) {
    std::vector<double> w;
    w.reserve(policy.weights[l].size());
    for (long r = 0; r < policy.weights[l].rows(); ++r) {
      for (long c = 0; c < policy.weights[l].cols(); ++c) {
        w.push_back(policy.weights[l](r, c));
      }
    }
    weights.push_back(w);
    std::vector<double> b(policy.biases[l].data(),
                          policy.biases[l].data() + policy.biases[l].size());
    biases.push_back(b);
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["config"] = sac_config_to_json(cfg);

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

PolicyCheckpoint load_policy_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (j.value("kind", "") != "policy_checkpoint") {
    throw ParseError(path + ": not a policy checkpoint");
  }

  PolicyCheckpoint ck;
  ck.seed = j.at("seed").get<std::uint64_t>();
  ck.config = sac_config_from_json(j.at("config"));
  ck.policy.sizes = j.at("layer_sizes").get<std::vector<int>>();
  if (ck.policy.sizes.size() < 2) throw ParseError(path + ": bad layer sizes");

  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  const std::size_t layers = ck.policy.sizes.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw ParseError(path + ": layer count mismatch");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    const int in_dim = ck.policy.sizes[l];
    const int out_dim = ck.policy.sizes[l + 1];
    const auto wv = weights[l].get<std::vector<double>>();
    const auto bv = biases[l].get<std::vector<double>>();
    if (wv.size() != static_cast<std::size_t>(in_dim) * out_dim ||
        bv.size() != static_cast<std::size_t>(out_dim)) {
      throw ParseError(path + ": parameter shape mismatch in layer " +
                       std::to_string(l));
    }
    Eigen::MatrixXd w(in_dim, out_dim);
    std::size_t k = 0;
    for (int r = 0; r < in_dim; ++r) {
      for (int c = 0; c < out_dim; ++c) w(r, c) = wv[k++];
    }
    Eigen::MatrixXd b(1, out_dim);
    for (int c = 0; c < out_dim; ++c) b(0, c) = bv[c];
    ck.policy.weights.push_back(std::move(w));
    ck.policy.biases.push_back(std::move(b));
  }
  return ck;
}

}  // namespace bems::agent
