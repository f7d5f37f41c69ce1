#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quadsac/config.hpp"
#include "quadsac/env_gototarget.hpp"
#include "quadsac/episode_log.hpp"
#include "quadsac/sac.hpp"

namespace quadsac {

// Seed derivation, fixed so runs can be reproduced piecewise:
//   agent init      mix_seed(seed, 0)
//   training rng    mix_seed(seed, 1)  (resets, warmup actions, policy noise, batches)
//   curve eval rng  mix_seed(mix_seed(seed, 2), env_steps at the eval point)
SacAgent make_agent(const ExperimentConfig& config);

struct TrainResult {
  std::string final_checkpoint_path;
  std::string curve_path;
  std::int64_t env_steps = 0;
};

// Uniform-random warmup, then alternating rollout/update epochs until
// total_env_steps; appends a learning-curve row (deterministic fixed-target
// evaluation + mean losses since the previous row) every eval_interval steps
// and at the end; writes periodic and final checkpoints into out_dir.
// Fully deterministic per seed: same config + seed -> byte-identical files.
TrainResult train(const ExperimentConfig& config);

// One episode under the deterministic policy from an explicit start pose.
EpisodeRecord run_episode(const SacAgent& agent, const ExperimentConfig& config,
                          const TargetPath& path, const InitPose& pose, int max_steps);

struct EvalSummary {
  std::vector<EpisodeRecord> episodes;
  double mean_reward = 0.0;
  int completed = 0;  // episodes that were not radius-terminated
};

// n deterministic-policy episodes on the fixed target; start poses drawn
// from the init distribution with `seed`.
EvalSummary evaluate_fixed(const SacAgent& agent, const ExperimentConfig& config,
                           int n_episodes, std::uint64_t seed, int max_steps);

// One deterministic-policy episode tracking a moving target; the drone
// starts level at the path's base position.
EpisodeRecord evaluate_path(const SacAgent& agent, const ExperimentConfig& config,
                            PathKind kind, double speed);

struct RobustnessReport {
  int episode_count = 0;
  int success_count = 0;       // episodes not terminated by the radius
  double success_rate = 0.0;
  double median_total_reward = 0.0;
  double mean_total_reward = 0.0;
};

// x,y in {-1.5, 0, 1.5} m, z in {1.2, 2.2} m, roll,pitch in {-44.69, 44.69}
// deg, yaw in {-44.69, 0, 44.69} deg: 216 poses, yaw fastest-varying.
std::vector<InitPose> default_robustness_grid();

// One deterministic training-length episode per grid pose on the fixed target.
RobustnessReport robustness_sweep(const SacAgent& agent, const ExperimentConfig& config,
                                  const std::vector<InitPose>& grid,
                                  std::vector<RobustnessRow>* rows = nullptr);

// Mean episode reward of uniform-random actions over n episodes; start poses
// use the same `seed` stream as evaluate_fixed, so both suites see identical
// initializations.
double random_policy_baseline(const ExperimentConfig& config, int n_episodes,
                              std::uint64_t seed, int max_steps);

}  // namespace quadsac
