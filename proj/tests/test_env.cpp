#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "quadsac/env_gototarget.hpp"
#include "quadsac/quad_dynamics.hpp"
#include "quadsac/rng.hpp"

using namespace quadsac;
using Eigen::Vector3d;
using Eigen::Vector4d;

namespace {

GoToTargetEnv make_env() {
  return GoToTargetEnv(QuadParams{}, EpisodeConfig{}, InitDistribution{},
                       RewardWeights{}, TargetPath{});
}

RigidState state_at(const Vector3d& pos, const Vector3d& ang_vel) {
  RigidState s;
  s.position = pos;
  s.ang_vel = ang_vel;
  return s;
}

bool in_set(double v, const std::vector<double>& set, double tol = 1e-12) {
  return std::any_of(set.begin(), set.end(),
                     [&](double m) { return std::abs(v - m) < tol; });
}

}  // namespace

TEST_CASE("reward reproduces the hand-evaluated cases") {
  const RewardWeights w;
  const Vector3d target(0.0, 0.0, 1.7);
  // At the target with zero rates: only the alive bonus remains.
  CHECK(reward(state_at(target, Vector3d::Zero()), target, w) == 1.5);
  // 1 m of position error plus 1 rad/s of yaw rate: 1.5 - 1.0 - 0.1 = 0.4.
  CHECK(std::abs(reward(state_at(target + Vector3d(1.0, 0.0, 0.0), {0.0, 0.0, 1.0}),
                        target, w) -
                 0.4) < 1e-12);
  // Zero error, all rates at 2 rad/s: 1.5 - 0.1 - 0.1 - 0.2 = 1.1.
  CHECK(std::abs(reward(state_at(target, {2.0, 2.0, 2.0}), target, w) - 1.1) < 1e-12);
  // Error direction does not matter, only its norm.
  const Vector3d off = Vector3d(0.6, -0.8, 0.0);  // norm 1
  CHECK(std::abs(reward(state_at(target + off, Vector3d::Zero()), target, w) - 0.5) <
        1e-12);
}

TEST_CASE("reward is bounded by the alive bonus, equality only at rest on target") {
  const RewardWeights w;
  Rng rng(2024);
  const Vector3d target(0.0, 0.0, 1.7);
  for (int i = 0; i < 100000; ++i) {
    Vector3d pos, av;
    for (int k = 0; k < 3; ++k) {
      pos[k] = rng.uniform(-8.0, 8.0);
      av[k] = rng.uniform(-30.0, 30.0);
    }
    const double r = reward(state_at(pos, av), target, w);
    CHECK(r <= 1.5);
    if (r == 1.5) {
      CHECK((pos - target).norm() == 0.0);
      CHECK(av.norm() == 0.0);
    }
  }
}

TEST_CASE("reset at the target pose yields the canonical observation") {
  GoToTargetEnv env = make_env();
  const Observation obs = env.reset(InitPose{{0.0, 0.0, 1.7}, {0.0, 0.0, 0.0}});
  REQUIRE(obs.size() == kObservationDim);
  CHECK(obs.segment<3>(0).norm() == 0.0);   // rel position
  CHECK(obs.segment<3>(3).norm() == 0.0);   // rel attitude
  CHECK(obs.segment<3>(6).norm() == 0.0);   // linear velocity
  CHECK(obs.segment<3>(9).norm() == 0.0);   // angular rates
  Eigen::Matrix3d rot;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot(r, c) = obs[12 + 3 * r + c];
  CHECK((rot - Eigen::Matrix3d::Identity()).norm() == 0.0);
  CHECK(obs.segment<4>(21).norm() == 0.0);  // previous action
}

TEST_CASE("observation blocks track pose, rates, and previous action") {
  GoToTargetEnv env = make_env();
  env.reset(InitPose{{1.0, -0.5, 2.0}, {0.2, -0.1, 0.3}});
  Observation obs = env.observation();
  CHECK((obs.segment<3>(0) - (Vector3d(0.0, 0.0, 1.7) - Vector3d(1.0, -0.5, 2.0)))
            .norm() < 1e-15);
  CHECK((obs.segment<3>(3) - Vector3d(0.2, -0.1, 0.3)).cwiseAbs().maxCoeff() < 1e-12);

  // Step with an out-of-range command: prev_action stores the clamped values.
  const Vector4d wild(150.0, -2000.0, 30.0, 7.0);
  const StepResult sr = env.step(wild);
  CHECK((sr.obs.segment<4>(21) - Vector4d(100.0, -100.0, 30.0, 7.0)).norm() == 0.0);
  // Rotation block mirrors the state matrix row-major.
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(sr.obs[12 + 3 * r + c] == env.state().rotation(r, c));
}

TEST_CASE("seeded resets are reproducible and draw from the documented sets") {
  GoToTargetEnv env = make_env();
  const InitDistribution init;
  Rng a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    const Observation oa = env.reset(a);
    const Eigen::Vector3d pa = env.state().position;
    const Observation ob = env.reset(b);
    CHECK((oa - ob).norm() == 0.0);
    CHECK((env.state().position - pa).norm() == 0.0);
  }

  Rng rng(7);
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  std::vector<double> angle_set_rad;
  for (double d : init.angle_set_deg) angle_set_rad.push_back(d * kDegToRad);
  int hit_extreme = 0;
  for (int i = 0; i < 10000; ++i) {
    const InitPose p = sample_init_pose(init, rng);
    CHECK(in_set(p.position.x(), init.xy_set));
    CHECK(in_set(p.position.y(), init.xy_set));
    CHECK(in_set(p.position.z(), init.z_set));
    CHECK(in_set(p.attitude.x(), angle_set_rad));
    CHECK(in_set(p.attitude.y(), angle_set_rad));
    CHECK(in_set(p.attitude.z(), angle_set_rad));
    if (std::abs(p.position.x() - 1.5) < 1e-12) ++hit_extreme;
  }
  // Uniform over 7 values: ~1429 expected hits on x = +1.5.
  CHECK(hit_extreme > 1000);
  CHECK(hit_extreme < 2000);
}

TEST_CASE("zero-action step matches a scalar vertical-axis oracle") {
  GoToTargetEnv env = make_env();
  const QuadParams p = env.quad_params();
  env.reset(InitPose{{0.0, 0.0, 1.7}, {0.0, 0.0, 0.0}});

  // Level at rest with equal thrusts: motion is pure z. Replicate the
  // integrator (semi-implicit velocity, midpoint position) per substep.
  const double ti = thrust_from_pwm(0.0, p.thrust_coeffs);
  const double total = ((ti + ti) + ti) + ti;
  const double dt = 0.05 / p.physics_substeps;
  double z = 1.7, vz = 0.0;
  for (int step = 0; step < 3; ++step) {
    for (int k = 0; k < p.physics_substeps; ++k) {
      const double fz = (total + -p.mass * p.gravity) - p.linear_drag_coeff * vz;
      const double az = fz / p.mass;
      const double vz_new = vz + dt * az;
      z += dt * 0.5 * (vz + vz_new);
      vz = vz_new;
    }
    const StepResult sr = env.step(Vector4d::Zero());
    CHECK(std::abs(env.state().position.z() - z) < 1e-12);
    CHECK(std::abs(env.state().lin_vel.z() - vz) < 1e-12);
    CHECK(env.state().position.head<2>().norm() == 0.0);
    CHECK(env.state().ang_vel.norm() == 0.0);
    // Reward recomputed from the post-step state must match the env's.
    const double expect =
        reward(env.state(), env.target_pos(), env.reward_weights());
    CHECK(sr.reward == expect);
    CHECK_FALSE(sr.terminated);
    CHECK_FALSE(sr.truncated);
  }
}

TEST_CASE("leaving the termination radius ends the episode as a failure") {
  GoToTargetEnv env = make_env();
  env.reset(InitPose{{6.4, 0.0, 1.7}, {0.0, 0.0, 0.0}});
  StepResult sr;
  int steps = 0;
  do {
    sr = env.step(Vector4d::Zero());  // under-thrust: the drone falls away
    ++steps;
    REQUIRE(steps < 250);
  } while (!sr.done());
  CHECK(sr.terminated);
  CHECK_FALSE(sr.truncated);
  CHECK(env.episode_done());
  CHECK((env.target_pos() - env.state().position).norm() > 6.5);
  CHECK_THROWS_AS(env.step(Vector4d::Zero()), EpisodeFinishedError);
}

TEST_CASE("reaching the step limit truncates without terminating") {
  EpisodeConfig episode;
  episode.max_steps = 5;
  GoToTargetEnv env(QuadParams{}, episode, InitDistribution{}, RewardWeights{},
                    TargetPath{});
  const double h = hover_pwm(env.quad_params());
  env.reset(InitPose{{0.0, 0.0, 1.7}, {0.0, 0.0, 0.0}});
  for (int i = 0; i < 4; ++i) {
    const StepResult sr = env.step(Vector4d::Constant(h));
    CHECK_FALSE(sr.done());
  }
  const StepResult last = env.step(Vector4d::Constant(h));
  CHECK(last.truncated);
  CHECK_FALSE(last.terminated);
  CHECK(env.episode_done());
  CHECK_THROWS_AS(env.step(Vector4d::Constant(h)), EpisodeFinishedError);
}

TEST_CASE("stepping before the first reset is a caller bug") {
  GoToTargetEnv env = make_env();
  CHECK_THROWS_AS(env.step(Vector4d::Zero()), EpisodeFinishedError);
  // The finished-episode error is a logic error, not a physics error.
  CHECK_THROWS_AS(env.step(Vector4d::Zero()), std::logic_error);
  env.reset(InitPose{});
  CHECK_THROWS_AS(env.step(Vector4d::Constant(std::nan(""))), std::invalid_argument);
}

TEST_CASE("identical seeds and actions reproduce episodes bit for bit") {
  GoToTargetEnv env_a = make_env();
  GoToTargetEnv env_b = make_env();
  Rng seed_a(99), seed_b(99), actions(123);

  const Observation oa = env_a.reset(seed_a);
  const Observation ob = env_b.reset(seed_b);
  CHECK((oa - ob).norm() == 0.0);
  std::vector<Vector4d> plan;
  for (int i = 0; i < 50; ++i) {
    Vector4d a;
    for (int k = 0; k < 4; ++k) a[k] = actions.uniform(-100.0, 100.0);
    plan.push_back(a);
  }
  for (const auto& a : plan) {
    if (env_a.episode_done()) break;
    const StepResult ra = env_a.step(a);
    const StepResult rb = env_b.step(a);
    CHECK((ra.obs - rb.obs).norm() == 0.0);
    CHECK(ra.reward == rb.reward);
    CHECK(ra.terminated == rb.terminated);
    CHECK(ra.truncated == rb.truncated);
  }
}

TEST_CASE("cumulative reward never exceeds bonus times horizon") {
  GoToTargetEnv env = make_env();
  Rng rng(5);
  double total = 0.0;
  env.reset(rng);
  while (!env.episode_done()) {
    Vector4d a;
    for (int k = 0; k < 4; ++k) a[k] = rng.uniform(-100.0, 100.0);
    total += env.step(a).reward;
  }
  CHECK(total <= 1.5 * 250 + 1e-9);
}

TEST_CASE("target paths hit their reference points") {
  const Vector3d base(0.0, 0.0, 1.7);
  TargetPath fixed;  // default kind
  CHECK((target_position(fixed, base, 37.0) - base).norm() == 0.0);

  TargetPath line;
  line.kind = PathKind::line;
  line.speed = 0.2;
  CHECK((target_position(line, base, 5.0) - Vector3d(1.0, 0.0, 1.7)).norm() < 1e-12);

  TargetPath square;
  square.kind = PathKind::square;
  square.speed = 0.2;
  // Arc length 2 m = one full side from the (-1,-1) corner along +x.
  CHECK((target_position(square, base, 10.0) - Vector3d(1.0, -1.0, 1.7)).norm() <
        1e-12);
  CHECK((target_position(square, base, 0.0) - Vector3d(-1.0, -1.0, 1.7)).norm() <
        1e-12);

  TargetPath sine;
  sine.kind = PathKind::sinusoid;
  sine.speed = 0.2;
  // x = 1 -> z = 1.7 + sin(pi/2) = 2.7.
  CHECK((target_position(sine, base, 5.0) - Vector3d(1.0, 0.0, 2.7)).norm() < 1e-12);
}

TEST_CASE("square path is continuous, periodic, and speed-consistent") {
  const Vector3d base(0.0, 0.0, 1.7);
  TargetPath square;
  square.kind = PathKind::square;
  square.speed = 0.2;
  const double period = 4.0 * square.square_side / square.speed;  // 40 s
  for (double t = 0.0; t < 80.0; t += 0.31) {
    const Vector3d now = target_position(square, base, t);
    const Vector3d next = target_position(square, base, t + 0.01);
    const double hop = (next - now).norm();
    CHECK(hop <= square.speed * 0.01 + 1e-9);  // chord never exceeds arc
    CHECK(hop > 0.0);
    CHECK((target_position(square, base, t + period) - now).norm() < 1e-9);
    // Always on the perimeter: max coordinate magnitude equals half the side.
    CHECK(std::abs(std::max(std::abs(now.x()), std::abs(now.y())) - 1.0) < 1e-9);
    CHECK(now.z() == base.z());
  }
}

TEST_CASE("path kinds round-trip through their names") {
  for (auto kind : {PathKind::fixed, PathKind::line, PathKind::square,
                    PathKind::sinusoid}) {
    CHECK(path_kind_from_string(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(path_kind_from_string("zigzag"), std::invalid_argument);
}

TEST_CASE("configuration validation rejects bad values") {
  EpisodeConfig episode;
  episode.max_steps = 0;
  CHECK_THROWS_AS(episode.validate(), std::invalid_argument);
  episode = EpisodeConfig{};
  episode.termination_radius = -1.0;
  CHECK_THROWS_AS(episode.validate(), std::invalid_argument);

  RewardWeights w;
  w.pos_coeff = -0.1;
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);

  InitDistribution init;
  init.z_set.clear();
  CHECK_THROWS_AS(init.validate(), std::invalid_argument);

  TargetPath path;
  path.speed = -0.5;
  CHECK_THROWS_AS(path.validate(), std::invalid_argument);
}
