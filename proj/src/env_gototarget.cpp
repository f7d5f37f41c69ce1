#include "quadsac/env_gototarget.hpp"

#include <cmath>
#include <numbers>

namespace quadsac {

void RewardWeights::validate() const {
  if (alive_bonus < 0.0 || pos_coeff < 0.0 || roll_rate_coeff < 0.0 ||
      pitch_rate_coeff < 0.0 || yaw_rate_coeff < 0.0) {
    throw std::invalid_argument("RewardWeights: coefficients must be non-negative");
  }
}

void EpisodeConfig::validate() const {
  if (!(control_dt > 0.0)) throw std::invalid_argument("EpisodeConfig: control_dt must be > 0");
  if (max_steps <= 0) throw std::invalid_argument("EpisodeConfig: max_steps must be > 0");
  if (!(termination_radius > 0.0)) {
    throw std::invalid_argument("EpisodeConfig: termination_radius must be > 0");
  }
  if (!target_position.allFinite() || !target_attitude.allFinite()) {
    throw std::invalid_argument("EpisodeConfig: target pose must be finite");
  }
}

void InitDistribution::validate() const {
  auto check = [](const std::vector<double>& set, const char* name) {
    if (set.empty()) {
      throw std::invalid_argument(std::string("InitDistribution: empty set ") + name);
    }
    for (double v : set) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("InitDistribution: non-finite member in ") + name);
      }
    }
  };
  check(xy_set, "xy_set");
  check(z_set, "z_set");
  check(angle_set_deg, "angle_set_deg");
}

PathKind path_kind_from_string(const std::string& s) {
  if (s == "fixed") return PathKind::fixed;
  if (s == "line") return PathKind::line;
  if (s == "square") return PathKind::square;
  if (s == "sinusoid") return PathKind::sinusoid;
  throw std::invalid_argument("unknown path kind: " + s);
}

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::fixed: return "fixed";
    case PathKind::line: return "line";
    case PathKind::square: return "square";
    case PathKind::sinusoid: return "sinusoid";
  }
  throw std::logic_error("unreachable path kind");
}

void TargetPath::validate() const {
  if (!(speed >= 0.0)) throw std::invalid_argument("TargetPath: speed must be >= 0");
  if (!(square_side > 0.0)) throw std::invalid_argument("TargetPath: square_side must be > 0");
  if (!(sin_wavelength > 0.0)) throw std::invalid_argument("TargetPath: sin_wavelength must be > 0");
  if (sin_amplitude < 0.0) throw std::invalid_argument("TargetPath: sin_amplitude must be >= 0");
}

Eigen::Vector3d target_position(const TargetPath& path, const Eigen::Vector3d& base,
                                double t) {
  if (t < 0.0) throw std::invalid_argument("target_position: t must be >= 0");
  switch (path.kind) {
    case PathKind::fixed:
      return base;
    case PathKind::line:
      return base + Eigen::Vector3d(path.speed * t, 0.0, 0.0);
    case PathKind::square: {
      const double s = path.square_side;
      const double perimeter = 4.0 * s;
      double arc = std::fmod(path.speed * t, perimeter);
      const double h = s / 2.0;
      // Corner-to-corner legs, counterclockwise from (-h, -h).
      double x, y;
      if (arc < s) {
        x = -h + arc;
        y = -h;
      } else if (arc < 2.0 * s) {
        x = h;
        y = -h + (arc - s);
      } else if (arc < 3.0 * s) {
        x = h - (arc - 2.0 * s);
        y = h;
      } else {
        x = -h;
        y = h - (arc - 3.0 * s);
      }
      return {base.x() + x, base.y() + y, base.z()};
    }
    case PathKind::sinusoid: {
      const double x = path.speed * t;
      const double z = path.sin_amplitude *
                       std::sin(2.0 * std::numbers::pi * x / path.sin_wavelength);
      return {base.x() + x, base.y(), base.z() + z};
    }
  }
  throw std::logic_error("unreachable path kind");
}

double reward(const RigidState& state, const Eigen::Vector3d& target_pos,
              const RewardWeights& weights) {
  const double pos_err = (target_pos - state.position).norm();
  return weights.alive_bonus - weights.pos_coeff * pos_err -
         weights.roll_rate_coeff * std::abs(state.ang_vel.x()) -
         weights.pitch_rate_coeff * std::abs(state.ang_vel.y()) -
         weights.yaw_rate_coeff * std::abs(state.ang_vel.z());
}

GoToTargetEnv::GoToTargetEnv(QuadParams quad, EpisodeConfig episode, InitDistribution init,
                             RewardWeights rewards, TargetPath path)
    : quad_(std::move(quad)),
      episode_(episode),
      init_(std::move(init)),
      rewards_(rewards),
      path_(path) {
  quad_.validate();
  episode_.validate();
  init_.validate();
  rewards_.validate();
  path_.validate();
}

InitPose sample_init_pose(const InitDistribution& init, Rng& rng) {
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  InitPose pose;
  pose.position.x() = init.xy_set[rng.index(init.xy_set.size())];
  pose.position.y() = init.xy_set[rng.index(init.xy_set.size())];
  pose.position.z() = init.z_set[rng.index(init.z_set.size())];
  pose.attitude.x() = init.angle_set_deg[rng.index(init.angle_set_deg.size())] * kDegToRad;
  pose.attitude.y() = init.angle_set_deg[rng.index(init.angle_set_deg.size())] * kDegToRad;
  pose.attitude.z() = init.angle_set_deg[rng.index(init.angle_set_deg.size())] * kDegToRad;
  return pose;
}

Observation GoToTargetEnv::reset(Rng& rng) { return reset(sample_init_pose(init_, rng)); }

Observation GoToTargetEnv::reset(const InitPose& pose) {
  if (!pose.position.allFinite() || !pose.attitude.allFinite()) {
    throw std::invalid_argument("reset: init pose must be finite");
  }
  state_.position = pose.position;
  state_.rotation = rotation_from_euler(pose.attitude.x(), pose.attitude.y(), pose.attitude.z());
  state_.lin_vel.setZero();
  state_.ang_vel.setZero();
  prev_action_.setZero();
  steps_taken_ = 0;
  done_ = false;
  return observation();
}

StepResult GoToTargetEnv::step(const Eigen::Vector4d& action) {
  if (done_) {
    throw EpisodeFinishedError("step called on a finished episode; call reset first");
  }
  MotorCommand cmd;
  for (int i = 0; i < 4; ++i) cmd.pwm[i] = action[i];
  // step_physics clamps internally; mirror the clamp for prev_action.
  state_ = step_physics(state_, cmd, quad_, episode_.control_dt);
  for (int i = 0; i < 4; ++i) {
    prev_action_[i] = std::clamp(action[i], -100.0, 100.0);
  }
  steps_taken_ += 1;

  StepResult result;
  const Eigen::Vector3d target = target_pos();
  result.reward = reward(state_, target, rewards_);
  result.terminated = (target - state_.position).norm() > episode_.termination_radius;
  result.truncated = !result.terminated && steps_taken_ >= episode_.max_steps;
  done_ = result.terminated || result.truncated;
  result.obs = observation();
  return result;
}

Eigen::Vector3d GoToTargetEnv::target_pos() const {
  return target_position(path_, episode_.target_position, time());
}

Observation GoToTargetEnv::observation() const {
  Observation obs(kObservationDim);
  const Eigen::Vector3d target = target_pos();
  obs.segment<3>(0) = target - state_.position;
  obs.segment<3>(3) = euler_from_rotation(state_.rotation) - episode_.target_attitude;
  obs.segment<3>(6) = state_.lin_vel;
  obs.segment<3>(9) = state_.ang_vel;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      obs[12 + 3 * r + c] = state_.rotation(r, c);
    }
  }
  obs.segment<4>(21) = prev_action_;
  return obs;
}

}  // namespace quadsac
