#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "quadsac/quad_dynamics.hpp"
#include "quadsac/rng.hpp"

namespace quadsac {

inline constexpr int kObservationDim = 25;
inline constexpr int kActionDim = 4;

// Observation layout (25 scalars, fixed order):
//   [0:3)   rel_pos    target minus drone position, world frame (m)
//   [3:6)   rel_euler  drone attitude minus target attitude (rad)
//   [6:9)   lin_vel    world-frame linear velocity (m/s)
//   [9:12)  ang_vel    body-frame angular velocity p,q,r (rad/s)
//   [12:21) rotation   body-to-world rotation matrix, row-major
//   [21:25) prev_action  previous clamped motor command (pwm units)
using Observation = Eigen::VectorXd;

struct RewardWeights {
  double alive_bonus = 1.5;       // reward per step for staying in the game
  double pos_coeff = 1.0;         // per meter of position error
  double roll_rate_coeff = 0.05;  // per rad/s of |p|
  double pitch_rate_coeff = 0.05; // per rad/s of |q|
  double yaw_rate_coeff = 0.1;    // per rad/s of |r|
  void validate() const;          // all non-negative
};

struct EpisodeConfig {
  double control_dt = 0.05;          // s per agent step
  int max_steps = 250;               // truncation horizon
  double termination_radius = 6.5;   // m from target -> episode failure
  Eigen::Vector3d target_position{0.0, 0.0, 1.7};
  Eigen::Vector3d target_attitude{0.0, 0.0, 0.0};  // roll, pitch, yaw (rad)
  void validate() const;
};

// Discrete uniform sets for the drop-in-the-air initialization.
// Angles are stored in degrees and converted at sampling time.
struct InitDistribution {
  std::vector<double> xy_set{-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5};
  std::vector<double> z_set{1.2, 1.3, 1.4, 1.5, 1.6, 1.7, 1.8, 1.9, 2.0, 2.1, 2.2};
  std::vector<double> angle_set_deg{-44.69, -36.1,  -26.93, -17.76, -9.17, 0.0,
                                    9.17,   17.76,  26.93,  36.1,   44.69};
  void validate() const;  // all sets non-empty, members finite
};

enum class PathKind { fixed, line, square, sinusoid };

PathKind path_kind_from_string(const std::string& s);
std::string to_string(PathKind kind);

// Target trajectory. The base pose is the fixed-target position; moving
// paths start there at t = 0 and are parameterized by arc length = speed*t.
struct TargetPath {
  PathKind kind = PathKind::fixed;
  double speed = 0.2;            // m/s along the path
  double square_side = 2.0;      // m; square is centered on (base.x, base.y)
  double sin_amplitude = 1.0;    // m, vertical
  double sin_wavelength = 4.0;   // m along x
  void validate() const;
};

// Position of the target at time t.
//   fixed:    base
//   line:     base + (speed*t, 0, 0)
//   square:   perimeter of the axis-aligned square centered on (base.x, base.y)
//             at z = base.z, starting at the (-s/2, -s/2) corner, first side +x,
//             counterclockwise seen from above
//   sinusoid: x = speed*t, y = base.y, z = base.z + A*sin(2*pi*x/wavelength)
Eigen::Vector3d target_position(const TargetPath& path, const Eigen::Vector3d& base,
                                double t);

// r = alive - pos_coeff*||target - pos|| - c_p*|p| - c_q*|q| - c_r*|r|
double reward(const RigidState& state, const Eigen::Vector3d& target_pos,
              const RewardWeights& weights);

struct InitPose {
  Eigen::Vector3d position{0.0, 0.0, 1.7};
  Eigen::Vector3d attitude{0.0, 0.0, 0.0};  // roll, pitch, yaw (rad)
};

// Independent draws: x and y from xy_set, z from z_set, each attitude
// component from angle_set_deg (converted to radians).
InitPose sample_init_pose(const InitDistribution& init, Rng& rng);

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool terminated = false;  // left the termination radius
  bool truncated = false;   // hit the step limit
  bool done() const { return terminated || truncated; }
};

// Stepping a finished episode is a caller bug, distinct from physics errors.
struct EpisodeFinishedError : std::logic_error {
  using std::logic_error::logic_error;
};

class GoToTargetEnv {
 public:
  GoToTargetEnv(QuadParams quad, EpisodeConfig episode, InitDistribution init,
                RewardWeights rewards, TargetPath path);

  // Sample an initial pose from the init distribution (zero velocities).
  Observation reset(Rng& rng);
  // Place the drone at an explicit pose (zero velocities).
  Observation reset(const InitPose& pose);

  StepResult step(const Eigen::Vector4d& action);

  const RigidState& state() const { return state_; }
  Eigen::Vector3d target_pos() const;  // at the current episode time
  double time() const { return static_cast<double>(steps_taken_) * episode_.control_dt; }
  int steps_taken() const { return steps_taken_; }
  bool episode_done() const { return done_; }
  const EpisodeConfig& episode_config() const { return episode_; }
  const QuadParams& quad_params() const { return quad_; }
  const TargetPath& path() const { return path_; }
  const RewardWeights& reward_weights() const { return rewards_; }

  Observation observation() const;  // current observation (for inspection)

 private:
  QuadParams quad_;
  EpisodeConfig episode_;
  InitDistribution init_;
  RewardWeights rewards_;
  TargetPath path_;

  RigidState state_;
  Eigen::Vector4d prev_action_ = Eigen::Vector4d::Zero();
  int steps_taken_ = 0;
  bool done_ = true;  // must reset before the first step
};

}  // namespace quadsac
