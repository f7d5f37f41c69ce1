#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace quadsac {

// One control step of a flown episode: post-step time, drone pose and body
// rates, target position, the applied (clamped) action, and the reward.
struct EpisodeStepRow {
  double t = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Vector3d euler = Eigen::Vector3d::Zero();    // roll, pitch, yaw (rad)
  Eigen::Vector3d ang_vel = Eigen::Vector3d::Zero();  // p, q, r (rad/s)
  Eigen::Vector3d target = Eigen::Vector3d::Zero();
  Eigen::Vector4d action = Eigen::Vector4d::Zero();   // pwm
  double reward = 0.0;
};

struct EpisodeRecord {
  std::vector<EpisodeStepRow> rows;
  double total_reward = 0.0;
  int steps = 0;
  bool terminated = false;  // left the allowed radius (not stored in the CSV)
};

inline constexpr const char* kEpisodeCsvHeader =
    "t,x,y,z,phi,theta,psi,p,q,r,tx,ty,tz,a1,a2,a3,a4,reward";

// Doubles are written in shortest round-trip form, so emitted files
// re-parse to bit-identical values.
void write_episode_csv(const std::string& path, const EpisodeRecord& record);

// Rebuilds rows plus the derivable summary (steps, total_reward); the
// terminated flag is not part of the file format and is left false.
EpisodeRecord read_episode_csv(const std::string& path);

struct LearningCurveRow {
  std::int64_t env_steps = 0;
  double mean_eval_reward = 0.0;
  double q1_loss = 0.0;
  double q2_loss = 0.0;
  double value_loss = 0.0;
  double policy_loss = 0.0;
  double entropy = 0.0;
};

inline constexpr const char* kCurveCsvHeader =
    "env_steps,mean_eval_reward,q1_loss,q2_loss,value_loss,policy_loss,entropy";

// Requires env_steps strictly increasing across rows.
void write_learning_curve_csv(const std::string& path,
                              const std::vector<LearningCurveRow>& rows);
std::vector<LearningCurveRow> read_learning_curve_csv(const std::string& path);

// Per-pose summary table emitted by the robustness sweep.
struct RobustnessRow {
  int pose_index = 0;
  Eigen::Vector3d position0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d attitude0 = Eigen::Vector3d::Zero();  // rad
  int steps = 0;
  bool terminated = false;
  double total_reward = 0.0;
};

inline constexpr const char* kRobustnessCsvHeader =
    "pose_index,x0,y0,z0,phi0,theta0,psi0,steps,terminated,total_reward";

void write_robustness_csv(const std::string& path, const std::vector<RobustnessRow>& rows);
std::vector<RobustnessRow> read_robustness_csv(const std::string& path);

}  // namespace quadsac
