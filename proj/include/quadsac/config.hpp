#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadsac/env_gototarget.hpp"
#include "quadsac/neural.hpp"
#include "quadsac/quad_dynamics.hpp"
#include "quadsac/sac.hpp"

namespace quadsac {

// Parse/validation failure with a "file:line:" anchor where applicable.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Environment knobs shared by training and evaluation; max_steps differs
// between the two, so the episode horizon is assembled on demand.
struct EnvSettings {
  double control_dt = 0.05;
  int max_steps_train = 250;
  int max_steps_eval = 500;
  double termination_radius = 6.5;
  Eigen::Vector3d target_position{0.0, 0.0, 1.7};
  RewardWeights rewards;
  InitDistribution init;
  TargetPath path;

  EpisodeConfig episode_config(int max_steps) const;
};

// SAC core hyperparameters plus the pieces that live around the agent:
// replay capacity, optimizer settings, and network widths.
struct SacSettings {
  SacConfig core;
  std::int64_t buffer_capacity = 1'000'000;
  AdamConfig adam;
  std::vector<int> policy_hidden{64, 64};
  std::vector<int> critic_hidden{256, 256};
};

struct TrainSettings {
  std::int64_t total_env_steps = 1'000'000;
  std::int64_t eval_interval = 10'000;
  int eval_episodes = 5;
  std::int64_t warmup_steps = 10'000;   // uniform-random action prefill
  std::int64_t checkpoint_interval = 100'000;
  std::uint64_t seed = 0;
  std::string out_dir = "runs/default";
};

struct ExperimentConfig {
  QuadParams quad;
  EnvSettings env;
  SacSettings sac;
  TrainSettings train;
  void validate() const;
};

ExperimentConfig default_experiment_config();

// TOML subset: [section] headers, key = value lines, # comments,
// numbers, booleans, double-quoted strings, and flat arrays of numbers.
// Unknown sections/keys and duplicate keys are rejected with line numbers.
ExperimentConfig parse_config_text(const std::string& text, const std::string& source_name);
ExperimentConfig parse_config_file(const std::string& path);

// Serialize with every key present, parseable by parse_config_text.
std::string config_to_toml(const ExperimentConfig& config);

}  // namespace quadsac
