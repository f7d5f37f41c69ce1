#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "quadsac/neural.hpp"
#include "quadsac/replay_buffer.hpp"
#include "quadsac/rng.hpp"

namespace quadsac {

struct SacConfig {
  double gamma = 0.99;          // discount factor
  int batch_size = 4000;
  double alpha = 0.2;           // fixed entropy temperature
  double tau = 0.005;           // target smoothing coefficient
  int updates_per_epoch = 1;    // gradient steps per epoch
  int env_steps_per_epoch = 1;  // environment steps per epoch
  double action_scale = 100.0;  // action = action_scale * tanh(u)
  double log_std_min = -20.0;
  double log_std_max = 2.0;
  void validate() const;
};

// Soft Actor-Critic, value-network variant: a squashed-Gaussian policy,
// twin Q critics, a state-value net, and its Polyak-averaged target.
// The policy head emits act_dim means followed by act_dim log-stds.
// Critic input is the observation concatenated with action/action_scale.
struct SacAgent {
  MlpNet policy;
  MlpNet q1;
  MlpNet q2;
  MlpNet value;
  MlpNet target_value;
  SacConfig config;
  AdamConfig adam;
  int obs_dim = 0;
  int act_dim = 0;

  int q_input_dim() const { return obs_dim + act_dim; }

  static SacAgent make(int obs_dim, int act_dim,
                       const std::vector<int>& policy_hidden,
                       const std::vector<int>& critic_hidden,
                       const SacConfig& config, const AdamConfig& adam,
                       std::uint64_t seed);
  // The go-to-target shapes: policy 25-64-64-8 tanh, critics 256-256 relu.
  static SacAgent make_default(std::uint64_t seed);
};

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

// Reparameterized draw: u = mean + exp(log_std) * xi, action = scale * tanh(u),
// strictly inside (-scale, scale). log_prob carries the tanh-and-scale
// change-of-variables correction.
ActionSample sample_action(const SacAgent& agent, const Eigen::VectorXd& obs, Rng& rng);

// Mean action through the squash: action_scale * tanh(mean(obs)).
Eigen::VectorXd act_deterministic(const SacAgent& agent, const Eigen::VectorXd& obs);

// log pi(a|s) for pre-squash value u given the Gaussian parameters:
//   sum_i [ -xi_i^2/2 - log(2 pi)/2 - log_std_i ]
// - sum_i [ log(1 - tanh(u_i)^2 + 1e-6) + log(action_scale) ].
// Exposed for density tests; sample_action and updates use the same arithmetic.
double squashed_log_prob(const Eigen::VectorXd& u, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& log_std, double action_scale);

struct SacUpdateStats {
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double entropy = 0.0;  // mean of -log pi over the fresh actions
};

// One maximum-entropy actor-critic step on a uniform batch:
//   y        = r + gamma * (1 - done) * target_value(s')
//   Q_i      regress 1/2 (Q_i(s,a) - y)^2
//   V target = min(Q1,Q2)(s, a~) - alpha * log pi(a~|s),  a~ ~ pi(.|s)
//   policy   minimize mean(alpha * log pi(a~|s) - min(Q1,Q2)(s, a~))
// All gradients are computed against the pre-update parameters, then each
// net takes its Adam step, then the target net is soft-updated.
SacUpdateStats sac_update(SacAgent& agent, const ReplayBuffer& buffer, Rng& rng);

// target_value <- (1 - tau) * target_value + tau * value, elementwise.
void soft_update_targets(SacAgent& agent);

// The policy objective mean(alpha * log pi - min Q) evaluated with a fixed
// noise matrix (act_dim x batch), and its exact gradient with respect to the
// policy parameters. Exposed so tests can finite-difference the actual
// update arithmetic.
double policy_objective(const SacAgent& agent, const Eigen::MatrixXd& obs,
                        const Eigen::MatrixXd& noise);
double policy_objective_and_grad(const SacAgent& agent, const Eigen::MatrixXd& obs,
                                 const Eigen::MatrixXd& noise, Gradients* policy_grads);

}  // namespace quadsac
