#include "quadsac/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "quadsac/checkpoint.hpp"
#include "quadsac/quad_dynamics.hpp"

namespace quadsac {

namespace {

void require_env_shapes(const SacAgent& agent) {
  if (agent.obs_dim != kObservationDim || agent.act_dim != kActionDim) {
    throw std::invalid_argument("agent shapes do not match the flight task (25 obs, 4 act)");
  }
}

EpisodeStepRow make_row(const GoToTargetEnv& env, const Eigen::Vector4d& action,
                        double reward) {
  EpisodeStepRow row;
  row.t = env.time();
  row.position = env.state().position;
  row.euler = euler_from_rotation(env.state().rotation);
  row.ang_vel = env.state().ang_vel;
  row.target = env.target_pos();
  row.action = action;
  row.reward = reward;
  return row;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

SacAgent make_agent(const ExperimentConfig& config) {
  return SacAgent::make(kObservationDim, kActionDim, config.sac.policy_hidden,
                        config.sac.critic_hidden, config.sac.core, config.sac.adam,
                        mix_seed(config.train.seed, 0));
}

TrainResult train(const ExperimentConfig& config) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.train.out_dir);

  SacAgent agent = make_agent(config);
  Rng rng(mix_seed(config.train.seed, 1));
  GoToTargetEnv env(config.quad, config.env.episode_config(config.env.max_steps_train),
                    config.env.init, config.env.rewards, config.env.path);
  ReplayBuffer buffer(kObservationDim, kActionDim, config.sac.buffer_capacity);

  std::vector<LearningCurveRow> curve;
  std::int64_t env_steps = 0;
  std::int64_t next_eval = config.train.eval_interval;
  std::int64_t next_ckpt = config.train.checkpoint_interval;
  SacUpdateStats loss_sums;
  std::int64_t updates_since_row = 0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Observation obs = env.reset(rng);
  const std::int64_t total = config.train.total_env_steps;
  while (env_steps < total) {
    for (int k = 0; k < config.sac.core.env_steps_per_epoch && env_steps < total; ++k) {
      Eigen::VectorXd action(kActionDim);
      if (env_steps < config.train.warmup_steps) {
        const double s = config.sac.core.action_scale;
        for (int i = 0; i < kActionDim; ++i) action[i] = rng.uniform(-s, s);
      } else {
        action = sample_action(agent, obs, rng).action;
      }
      const StepResult sr = env.step(Eigen::Vector4d(action));
      buffer.push(Transition{obs, action, sr.reward, sr.obs, sr.terminated});
      obs = sr.obs;
      env_steps += 1;
      if (sr.done()) obs = env.reset(rng);
    }

    if (env_steps >= config.train.warmup_steps &&
        buffer.size() >= config.sac.core.batch_size) {
      for (int u = 0; u < config.sac.core.updates_per_epoch; ++u) {
        const SacUpdateStats st = sac_update(agent, buffer, rng);
        if (!std::isfinite(st.q1_loss) || !std::isfinite(st.q2_loss) ||
            !std::isfinite(st.value_loss) || !std::isfinite(st.policy_loss)) {
          std::ostringstream msg;
          msg << "training diverged: non-finite loss at env step " << env_steps
              << " (q1 " << st.q1_loss << ", q2 " << st.q2_loss << ", value "
              << st.value_loss << ", policy " << st.policy_loss << ", batch size "
              << config.sac.core.batch_size << ")";
          throw std::runtime_error(msg.str());
        }
        loss_sums.q1_loss += st.q1_loss;
        loss_sums.q2_loss += st.q2_loss;
        loss_sums.value_loss += st.value_loss;
        loss_sums.policy_loss += st.policy_loss;
        loss_sums.entropy += st.entropy;
        updates_since_row += 1;
      }
    }

    if (env_steps >= next_eval || env_steps >= total) {
      const EvalSummary eval =
          evaluate_fixed(agent, config, config.train.eval_episodes,
                         mix_seed(mix_seed(config.train.seed, 2), env_steps),
                         config.env.max_steps_eval);
      LearningCurveRow row;
      row.env_steps = env_steps;
      row.mean_eval_reward = eval.mean_reward;
      const double inv = updates_since_row > 0 ? 1.0 / static_cast<double>(updates_since_row) : nan;
      row.q1_loss = loss_sums.q1_loss * inv;
      row.q2_loss = loss_sums.q2_loss * inv;
      row.value_loss = loss_sums.value_loss * inv;
      row.policy_loss = loss_sums.policy_loss * inv;
      row.entropy = loss_sums.entropy * inv;
      curve.push_back(row);
      loss_sums = SacUpdateStats{};
      updates_since_row = 0;
      while (next_eval <= env_steps) next_eval += config.train.eval_interval;
    }

    if (env_steps >= next_ckpt) {
      const fs::path path =
          fs::path(config.train.out_dir) / ("checkpoint_" + std::to_string(env_steps) + ".json");
      save_checkpoint(path.string(), agent, rng.save_state(), env_steps);
      while (next_ckpt <= env_steps) next_ckpt += config.train.checkpoint_interval;
    }
  }

  TrainResult result;
  result.env_steps = env_steps;
  const fs::path ck = fs::path(config.train.out_dir) / "checkpoint_final.json";
  save_checkpoint(ck.string(), agent, rng.save_state(), env_steps);
  result.final_checkpoint_path = ck.string();
  const fs::path curve_path = fs::path(config.train.out_dir) / "learning_curve.csv";
  write_learning_curve_csv(curve_path.string(), curve);
  result.curve_path = curve_path.string();
  return result;
}

EpisodeRecord run_episode(const SacAgent& agent, const ExperimentConfig& config,
                          const TargetPath& path, const InitPose& pose, int max_steps) {
  require_env_shapes(agent);
  GoToTargetEnv env(config.quad, config.env.episode_config(max_steps), config.env.init,
                    config.env.rewards, path);
  Observation obs = env.reset(pose);
  EpisodeRecord rec;
  while (!env.episode_done()) {
    const Eigen::Vector4d action(act_deterministic(agent, obs));
    const StepResult sr = env.step(action);
    rec.rows.push_back(make_row(env, action, sr.reward));
    rec.total_reward += sr.reward;
    if (sr.terminated) rec.terminated = true;
    obs = sr.obs;
  }
  rec.steps = env.steps_taken();
  return rec;
}

EvalSummary evaluate_fixed(const SacAgent& agent, const ExperimentConfig& config,
                           int n_episodes, std::uint64_t seed, int max_steps) {
  EvalSummary summary;
  Rng init_rng(seed);
  TargetPath fixed;
  fixed.kind = PathKind::fixed;
  for (int e = 0; e < n_episodes; ++e) {
    const InitPose pose = sample_init_pose(config.env.init, init_rng);
    EpisodeRecord rec = run_episode(agent, config, fixed, pose, max_steps);
    summary.mean_reward += rec.total_reward;
    if (!rec.terminated) summary.completed += 1;
    summary.episodes.push_back(std::move(rec));
  }
  if (n_episodes > 0) summary.mean_reward /= n_episodes;
  return summary;
}

EpisodeRecord evaluate_path(const SacAgent& agent, const ExperimentConfig& config,
                            PathKind kind, double speed) {
  TargetPath path = config.env.path;
  path.kind = kind;
  path.speed = speed;
  path.validate();
  InitPose pose;
  pose.position = config.env.target_position;
  pose.attitude.setZero();
  return run_episode(agent, config, path, pose, config.env.max_steps_eval);
}

std::vector<InitPose> default_robustness_grid() {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  const std::vector<double> xy{-1.5, 0.0, 1.5};
  const std::vector<double> z{1.2, 2.2};
  const std::vector<double> roll_pitch{-44.69, 44.69};
  const std::vector<double> yaw{-44.69, 0.0, 44.69};
  std::vector<InitPose> grid;
  grid.reserve(xy.size() * xy.size() * z.size() * roll_pitch.size() * roll_pitch.size() *
               yaw.size());
  for (double x : xy) {
    for (double y : xy) {
      for (double zz : z) {
        for (double phi : roll_pitch) {
          for (double theta : roll_pitch) {
            for (double psi : yaw) {
              InitPose pose;
              pose.position = {x, y, zz};
              pose.attitude = {phi * kDegToRad, theta * kDegToRad, psi * kDegToRad};
              grid.push_back(pose);
            }
          }
        }
      }
    }
  }
  return grid;
}

RobustnessReport robustness_sweep(const SacAgent& agent, const ExperimentConfig& config,
                                  const std::vector<InitPose>& grid,
                                  std::vector<RobustnessRow>* rows) {
  if (grid.empty()) throw std::invalid_argument("robustness_sweep: empty pose grid");
  TargetPath fixed;
  fixed.kind = PathKind::fixed;
  RobustnessReport report;
  std::vector<double> totals;
  totals.reserve(grid.size());
  if (rows) rows->clear();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const EpisodeRecord rec =
        run_episode(agent, config, fixed, grid[i], config.env.max_steps_train);
    report.episode_count += 1;
    if (!rec.terminated) report.success_count += 1;
    report.mean_total_reward += rec.total_reward;
    totals.push_back(rec.total_reward);
    if (rows) {
      RobustnessRow row;
      row.pose_index = static_cast<int>(i);
      row.position0 = grid[i].position;
      row.attitude0 = grid[i].attitude;
      row.steps = rec.steps;
      row.terminated = rec.terminated;
      row.total_reward = rec.total_reward;
      rows->push_back(row);
    }
  }
  report.success_rate =
      static_cast<double>(report.success_count) / static_cast<double>(report.episode_count);
  report.mean_total_reward /= static_cast<double>(report.episode_count);
  report.median_total_reward = median_of(std::move(totals));
  return report;
}

double random_policy_baseline(const ExperimentConfig& config, int n_episodes,
                              std::uint64_t seed, int max_steps) {
  if (n_episodes <= 0) throw std::invalid_argument("random_policy_baseline: need episodes");
  Rng init_rng(seed);  // same stream as evaluate_fixed -> same start poses
  Rng action_rng(mix_seed(seed, 0xAC7104));
  GoToTargetEnv env(config.quad, config.env.episode_config(max_steps), config.env.init,
                    config.env.rewards, TargetPath{});
  const double s = config.sac.core.action_scale;
  double mean = 0.0;
  for (int e = 0; e < n_episodes; ++e) {
    env.reset(sample_init_pose(config.env.init, init_rng));
    double total = 0.0;
    while (!env.episode_done()) {
      Eigen::Vector4d action;
      for (int i = 0; i < kActionDim; ++i) action[i] = action_rng.uniform(-s, s);
      total += env.step(action).reward;
    }
    mean += total;
  }
  return mean / n_episodes;
}

}  // namespace quadsac
