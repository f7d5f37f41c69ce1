#include "quadsac/sac.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace quadsac {

void SacConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("SacConfig: gamma out of (0,1)");
  if (batch_size <= 0) throw std::invalid_argument("SacConfig: batch_size must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("SacConfig: alpha must be > 0");
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("SacConfig: tau out of (0,1]");
  if (updates_per_epoch < 1) throw std::invalid_argument("SacConfig: updates_per_epoch must be >= 1");
  if (env_steps_per_epoch < 1) {
    throw std::invalid_argument("SacConfig: env_steps_per_epoch must be >= 1");
  }
  if (!(action_scale > 0.0)) throw std::invalid_argument("SacConfig: action_scale must be > 0");
  if (!(log_std_min < log_std_max)) {
    throw std::invalid_argument("SacConfig: log_std bounds out of order");
  }
}

SacAgent SacAgent::make(int obs_dim, int act_dim,
                        const std::vector<int>& policy_hidden,
                        const std::vector<int>& critic_hidden,
                        const SacConfig& config, const AdamConfig& adam,
                        std::uint64_t seed) {
  config.validate();
  adam.validate();
  if (obs_dim <= 0 || act_dim <= 0) {
    throw std::invalid_argument("SacAgent: dimensions must be positive");
  }
  auto layers = [](int in, const std::vector<int>& hidden, int out) {
    std::vector<int> v;
    v.reserve(hidden.size() + 2);
    v.push_back(in);
    v.insert(v.end(), hidden.begin(), hidden.end());
    v.push_back(out);
    return v;
  };
  SacAgent agent;
  agent.obs_dim = obs_dim;
  agent.act_dim = act_dim;
  agent.config = config;
  agent.adam = adam;
  const MlpSpec policy_spec{layers(obs_dim, policy_hidden, 2 * act_dim), Activation::tanh};
  const MlpSpec q_spec{layers(obs_dim + act_dim, critic_hidden, 1), Activation::relu};
  const MlpSpec v_spec{layers(obs_dim, critic_hidden, 1), Activation::relu};
  agent.policy = init_weights(policy_spec, mix_seed(seed, 0));
  agent.q1 = init_weights(q_spec, mix_seed(seed, 1));
  agent.q2 = init_weights(q_spec, mix_seed(seed, 2));
  agent.value = init_weights(v_spec, mix_seed(seed, 3));
  agent.target_value = agent.value;  // exact copy at construction
  return agent;
}

SacAgent SacAgent::make_default(std::uint64_t seed) {
  return make(25, 4, {64, 64}, {256, 256}, SacConfig{}, AdamConfig{}, seed);
}

namespace {

constexpr double kSquashEps = 1e-6;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

struct PolicyHeads {
  Eigen::MatrixXd mean;        // act x B
  Eigen::MatrixXd log_std;     // act x B, clamped
  Eigen::ArrayXXd clamp_mask;  // 1.0 where the raw log-std was inside the bounds
};

PolicyHeads split_policy_output(const SacAgent& agent, const Eigen::MatrixXd& out) {
  const int A = agent.act_dim;
  PolicyHeads h;
  h.mean = out.topRows(A);
  const Eigen::ArrayXXd raw = out.bottomRows(A).array();
  h.log_std = raw.min(agent.config.log_std_max).max(agent.config.log_std_min).matrix();
  h.clamp_mask = (raw > agent.config.log_std_min).cast<double>() *
                 (raw < agent.config.log_std_max).cast<double>();
  return h;
}

// Keep squashed values strictly inside (-1, 1) so scaled actions stay
// strictly inside (-action_scale, action_scale).
inline double squash(double u) {
  constexpr double kLim = 1.0 - 1e-12;
  return std::clamp(std::tanh(u), -kLim, kLim);
}

// Everything the value target and the policy objective need from one draw
// of fresh actions, with forward caches kept for the backward passes.
struct FreshSample {
  ForwardCache policy_cache;
  PolicyHeads heads;
  Eigen::MatrixXd t;            // squash(u), act x B; equals action/action_scale
  Eigen::RowVectorXd log_prob;  // 1 x B
  Eigen::MatrixXd q_in;         // (obs+act) x B
  ForwardCache q1_cache, q2_cache;
  Eigen::RowVectorXd q1, q2, min_q;
  Eigen::RowVectorXd use_q1;    // 1.0 where q1 <= q2 (min routing, ties to q1)
};

FreshSample compute_fresh(const SacAgent& agent, const Eigen::MatrixXd& obs,
                          const Eigen::MatrixXd& noise) {
  const int A = agent.act_dim;
  const Eigen::Index B = obs.cols();
  if (noise.rows() != A || noise.cols() != B) {
    throw std::invalid_argument("compute_fresh: noise shape mismatch");
  }
  FreshSample f;
  const Eigen::MatrixXd out = forward(agent.policy, obs, &f.policy_cache);
  if (!out.allFinite()) throw std::runtime_error("policy produced non-finite output");
  f.heads = split_policy_output(agent, out);
  const Eigen::MatrixXd u =
      f.heads.mean + (f.heads.log_std.array().exp() * noise.array()).matrix();
  f.t.resize(A, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    for (int i = 0; i < A; ++i) f.t(i, j) = squash(u(i, j));
  }
  const double log_scale = std::log(agent.config.action_scale);
  f.log_prob.resize(B);
  for (Eigen::Index j = 0; j < B; ++j) {
    double lp = 0.0;
    for (int i = 0; i < A; ++i) {
      lp += -0.5 * noise(i, j) * noise(i, j) - kHalfLog2Pi - f.heads.log_std(i, j);
      lp -= std::log(1.0 - f.t(i, j) * f.t(i, j) + kSquashEps) + log_scale;
    }
    f.log_prob[j] = lp;
  }
  f.q_in.resize(agent.q_input_dim(), B);
  f.q_in.topRows(agent.obs_dim) = obs;
  f.q_in.bottomRows(A) = f.t;  // action/action_scale == t
  f.q1 = forward(agent.q1, f.q_in, &f.q1_cache).row(0);
  f.q2 = forward(agent.q2, f.q_in, &f.q2_cache).row(0);
  f.min_q = f.q1.cwiseMin(f.q2);
  f.use_q1 = (f.q1.array() <= f.q2.array()).cast<double>().matrix();
  return f;
}

double policy_grad_from_fresh(const SacAgent& agent, const FreshSample& f,
                              const Eigen::MatrixXd& noise, Gradients* policy_grads) {
  const double alpha = agent.config.alpha;
  const double objective = alpha * f.log_prob.mean() - f.min_q.mean();
  if (!policy_grads) return objective;
  const int A = agent.act_dim;
  const Eigen::Index B = f.t.cols();
  const double inv_b = 1.0 / static_cast<double>(B);

  // d objective / d minQ_j = -1/B, routed to the smaller critic.
  const Eigen::MatrixXd gq1 = (-inv_b * f.use_q1.array()).matrix();
  const Eigen::MatrixXd gq2 = (-inv_b * (1.0 - f.use_q1.array())).matrix();
  const Eigen::MatrixXd in1 = backward(agent.q1, f.q1_cache, gq1, nullptr);
  const Eigen::MatrixXd in2 = backward(agent.q2, f.q2_cache, gq2, nullptr);
  // The critic's action input block is t itself, so these rows are dL/dt.
  Eigen::MatrixXd g_t = in1.bottomRows(A) + in2.bottomRows(A);
  // alpha * log pi contributes d/dt [-log(1 - t^2 + eps)] = 2t/(1 - t^2 + eps).
  g_t.array() +=
      (alpha * inv_b) * 2.0 * f.t.array() / (1.0 - f.t.array().square() + kSquashEps);
  // Through the squash: dt/du = 1 - t^2.
  const Eigen::MatrixXd g_u = (g_t.array() * (1.0 - f.t.array().square())).matrix();

  Eigen::MatrixXd g_out(2 * A, B);
  g_out.topRows(A) = g_u;  // du/dmean = 1
  // du/dlog_std = sigma * xi; the Gaussian normalizer adds -1 per dimension.
  g_out.bottomRows(A) =
      ((g_u.array() * f.heads.log_std.array().exp() * noise.array() - alpha * inv_b) *
       f.heads.clamp_mask)
          .matrix();
  backward(agent.policy, f.policy_cache, g_out, policy_grads);
  return objective;
}

std::string batch_summary(const Batch& batch) {
  std::ostringstream oss;
  oss << "batch summary: obs in [" << batch.obs.minCoeff() << ", " << batch.obs.maxCoeff()
      << "], actions in [" << batch.actions.minCoeff() << ", " << batch.actions.maxCoeff()
      << "], rewards in [" << batch.rewards.minCoeff() << ", " << batch.rewards.maxCoeff()
      << "], done fraction " << batch.done.mean();
  return oss.str();
}

}  // namespace

double squashed_log_prob(const Eigen::VectorXd& u, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std, double action_scale) {
  if (u.size() != mean.size() || u.size() != log_std.size()) {
    throw std::invalid_argument("squashed_log_prob: size mismatch");
  }
  const double log_scale = std::log(action_scale);
  double lp = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double sigma = std::exp(log_std[i]);
    const double xi = (u[i] - mean[i]) / sigma;
    lp += -0.5 * xi * xi - kHalfLog2Pi - log_std[i];
    const double t = std::tanh(u[i]);
    lp -= std::log(1.0 - t * t + kSquashEps) + log_scale;
  }
  return lp;
}

ActionSample sample_action(const SacAgent& agent, const Eigen::VectorXd& obs, Rng& rng) {
  if (obs.size() != agent.obs_dim) {
    throw std::invalid_argument("sample_action: observation size mismatch");
  }
  const Eigen::VectorXd out = forward(agent.policy, obs);
  if (!out.allFinite()) throw std::runtime_error("policy produced non-finite output");
  const int A = agent.act_dim;
  Eigen::VectorXd mean = out.head(A);
  Eigen::VectorXd log_std(A), u(A);
  for (int i = 0; i < A; ++i) {
    log_std[i] = std::clamp(out[A + i], agent.config.log_std_min, agent.config.log_std_max);
    u[i] = mean[i] + std::exp(log_std[i]) * rng.normal();
  }
  ActionSample s;
  s.log_prob = squashed_log_prob(u, mean, log_std, agent.config.action_scale);
  s.action.resize(A);
  for (int i = 0; i < A; ++i) s.action[i] = agent.config.action_scale * squash(u[i]);
  return s;
}

Eigen::VectorXd act_deterministic(const SacAgent& agent, const Eigen::VectorXd& obs) {
  if (obs.size() != agent.obs_dim) {
    throw std::invalid_argument("act_deterministic: observation size mismatch");
  }
  const Eigen::VectorXd out = forward(agent.policy, obs);
  Eigen::VectorXd action(agent.act_dim);
  for (int i = 0; i < agent.act_dim; ++i) {
    action[i] = agent.config.action_scale * squash(out[i]);
  }
  return action;
}

double policy_objective(const SacAgent& agent, const Eigen::MatrixXd& obs,
                        const Eigen::MatrixXd& noise) {
  return policy_grad_from_fresh(agent, compute_fresh(agent, obs, noise), noise, nullptr);
}

double policy_objective_and_grad(const SacAgent& agent, const Eigen::MatrixXd& obs,
                                 const Eigen::MatrixXd& noise, Gradients* policy_grads) {
  return policy_grad_from_fresh(agent, compute_fresh(agent, obs, noise), noise, policy_grads);
}

void soft_update_targets(SacAgent& agent) {
  const double tau = agent.config.tau;
  for (std::size_t l = 0; l < agent.value.weights.size(); ++l) {
    agent.target_value.weights[l] =
        (1.0 - tau) * agent.target_value.weights[l] + tau * agent.value.weights[l];
    agent.target_value.biases[l] =
        (1.0 - tau) * agent.target_value.biases[l] + tau * agent.value.biases[l];
  }
}

SacUpdateStats sac_update(SacAgent& agent, const ReplayBuffer& buffer, Rng& rng) {
  const SacConfig& cfg = agent.config;
  if (buffer.size() < cfg.batch_size) {
    throw std::runtime_error("sac_update: buffer smaller than batch_size");
  }
  const Batch batch = buffer.sample(cfg.batch_size, rng);
  const Eigen::Index B = cfg.batch_size;
  const double inv_b = 1.0 / static_cast<double>(B);
  SacUpdateStats stats;

  // Critic regression toward y = r + gamma * (1 - done) * target_value(s').
  const Eigen::RowVectorXd v_next = forward(agent.target_value, batch.next_obs).row(0);
  const Eigen::RowVectorXd y =
      (batch.rewards.array() + cfg.gamma * (1.0 - batch.done.array()) * v_next.array())
          .matrix();
  Eigen::MatrixXd q_in(agent.q_input_dim(), B);
  q_in.topRows(agent.obs_dim) = batch.obs;
  q_in.bottomRows(agent.act_dim) = batch.actions / cfg.action_scale;
  ForwardCache q1_cache, q2_cache;
  const Eigen::RowVectorXd q1 = forward(agent.q1, q_in, &q1_cache).row(0);
  const Eigen::RowVectorXd q2 = forward(agent.q2, q_in, &q2_cache).row(0);
  const Eigen::RowVectorXd d1 = q1 - y;
  const Eigen::RowVectorXd d2 = q2 - y;
  stats.q1_loss = 0.5 * d1.array().square().mean();
  stats.q2_loss = 0.5 * d2.array().square().mean();
  Gradients q1_grads, q2_grads;
  backward(agent.q1, q1_cache, inv_b * d1, &q1_grads);
  backward(agent.q2, q2_cache, inv_b * d2, &q2_grads);

  // One fresh-action draw shared by the value target and the policy loss.
  Eigen::MatrixXd noise(agent.act_dim, B);
  for (Eigen::Index j = 0; j < B; ++j) {
    for (int i = 0; i < agent.act_dim; ++i) noise(i, j) = rng.normal();
  }
  const FreshSample fresh = compute_fresh(agent, batch.obs, noise);

  ForwardCache v_cache;
  const Eigen::RowVectorXd v = forward(agent.value, batch.obs, &v_cache).row(0);
  const Eigen::RowVectorXd v_target =
      (fresh.min_q.array() - cfg.alpha * fresh.log_prob.array()).matrix();
  const Eigen::RowVectorXd dv = v - v_target;
  stats.value_loss = 0.5 * dv.array().square().mean();
  Gradients v_grads;
  backward(agent.value, v_cache, inv_b * dv, &v_grads);

  Gradients policy_grads;
  stats.policy_loss = policy_grad_from_fresh(agent, fresh, noise, &policy_grads);
  stats.entropy = -fresh.log_prob.mean();

  if (!std::isfinite(stats.q1_loss) || !std::isfinite(stats.q2_loss) ||
      !std::isfinite(stats.value_loss) || !std::isfinite(stats.policy_loss)) {
    std::ostringstream oss;
    oss << "sac_update: non-finite loss (q1=" << stats.q1_loss << ", q2=" << stats.q2_loss
        << ", value=" << stats.value_loss << ", policy=" << stats.policy_loss << "); "
        << batch_summary(batch);
    throw std::runtime_error(oss.str());
  }

  // All gradients above were taken against the pre-update parameters.
  adam_step(agent.q1, q1_grads, agent.adam);
  adam_step(agent.q2, q2_grads, agent.adam);
  adam_step(agent.value, v_grads, agent.adam);
  adam_step(agent.policy, policy_grads, agent.adam);
  soft_update_targets(agent);
  return stats;
}

}  // namespace quadsac
