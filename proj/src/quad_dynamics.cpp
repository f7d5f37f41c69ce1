#include "quadsac/quad_dynamics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quadsac {

namespace {

bool all_finite(const RigidState& s) {
  return s.position.allFinite() && s.rotation.allFinite() &&
         s.lin_vel.allFinite() && s.ang_vel.allFinite();
}

Mat3 skew(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

// Rodrigues rotation exp([w]x), series form below ~1e-8 rad.
Mat3 exp_so3(const Vec3& w) {
  const double angle = w.norm();
  const Mat3 wx = skew(w);
  if (angle < 1e-8) {
    return Mat3::Identity() + wx + 0.5 * (wx * wx);
  }
  const double s = std::sin(angle) / angle;
  const double c = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + s * wx + c * (wx * wx);
}

}  // namespace

void QuadParams::validate() const {
  if (!(mass > 0.0)) throw std::invalid_argument("QuadParams: mass must be > 0");
  if (!(inertia_diag.array() > 0.0).all())
    throw std::invalid_argument("QuadParams: inertia_diag components must be > 0");
  if (!(arm_length > 0.0)) throw std::invalid_argument("QuadParams: arm_length must be > 0");
  if (physics_substeps < 1)
    throw std::invalid_argument("QuadParams: physics_substeps must be >= 1");
  if (!(gravity >= 0.0) || !std::isfinite(gravity))
    throw std::invalid_argument("QuadParams: gravity must be finite and >= 0");
  if (!(linear_drag_coeff >= 0.0) || !(angular_drag_coeff >= 0.0))
    throw std::invalid_argument("QuadParams: drag coefficients must be >= 0");
}

double thrust_from_pwm(double pwm, const ThrustCoeffs& c) {
  return c.a2 * pwm * pwm + c.a1 * pwm + c.a0;
}

double hover_pwm(const QuadParams& p) {
  const ThrustCoeffs& c = p.thrust_coeffs;
  const double per_motor = p.mass * p.gravity / 4.0;
  if (c.a2 == 0.0) {
    if (c.a1 == 0.0) throw std::invalid_argument("hover_pwm: thrust map is constant");
    return (per_motor - c.a0) / c.a1;
  }
  const double disc = c.a1 * c.a1 - 4.0 * c.a2 * (c.a0 - per_motor);
  if (disc < 0.0) throw std::invalid_argument("hover_pwm: thrust map cannot reach hover");
  return (-c.a1 + std::sqrt(disc)) / (2.0 * c.a2);
}

RigidState step_physics(const RigidState& state, const MotorCommand& cmd,
                        const QuadParams& params, double dt_control) {
  params.validate();
  if (!(dt_control > 0.0) || !std::isfinite(dt_control))
    throw std::invalid_argument("step_physics: dt_control must be finite and > 0");
  if (!all_finite(state))
    throw std::invalid_argument("step_physics: non-finite state component");
  for (double p : cmd.pwm)
    if (!std::isfinite(p))
      throw std::invalid_argument("step_physics: non-finite motor command");

  std::array<double, 4> thrust;
  for (int i = 0; i < 4; ++i) {
    const double pwm = std::clamp(cmd.pwm[i], -100.0, 100.0);
    thrust[i] = thrust_from_pwm(pwm, params.thrust_coeffs);
    if (params.clamp_thrust_at_zero && thrust[i] < 0.0) thrust[i] = 0.0;
  }
  const double total_thrust = thrust[0] + thrust[1] + thrust[2] + thrust[3];

  // Rotor lever arm along each body diagonal.
  const double d = params.arm_length / std::sqrt(2.0);
  // Motor order: fl, fr, rr, rl at body positions (+d,+d) (+d,-d) (-d,-d) (-d,+d).
  const double tau_x = d * (thrust[0] - thrust[1] - thrust[2] + thrust[3]);
  const double tau_y = d * (-thrust[0] - thrust[1] + thrust[2] + thrust[3]);
  const double tau_z =
      params.yaw_torque_coeff * (thrust[0] - thrust[1] + thrust[2] - thrust[3]);
  const Vec3 thrust_torque(tau_x, tau_y, tau_z);

  const Vec3 inertia = params.inertia_diag;
  const Vec3 gravity_force(0.0, 0.0, -params.mass * params.gravity);
  const double dt = dt_control / params.physics_substeps;

  RigidState s = state;
  for (int k = 0; k < params.physics_substeps; ++k) {
    const Vec3 force = s.rotation.col(2) * total_thrust + gravity_force -
                       params.linear_drag_coeff * s.lin_vel;
    const Vec3 accel = force / params.mass;

    const Vec3 ang_momentum = inertia.cwiseProduct(s.ang_vel);
    const Vec3 torque = thrust_torque - s.ang_vel.cross(ang_momentum) -
                        params.angular_drag_coeff * s.ang_vel;
    const Vec3 ang_accel = torque.cwiseQuotient(inertia);

    // Velocity first; position advanced with the velocity midpoint so a
    // constant-acceleration segment integrates exactly.
    const Vec3 new_vel = s.lin_vel + dt * accel;
    s.position += dt * 0.5 * (s.lin_vel + new_vel);
    s.lin_vel = new_vel;

    s.ang_vel += dt * ang_accel;
    s.rotation = s.rotation * exp_so3(s.ang_vel * dt);
  }
  s.rotation = orthonormalized(s.rotation);
  return s;
}

Mat3 rotation_from_euler(double phi, double theta, double psi) {
  const double cphi = std::cos(phi), sphi = std::sin(phi);
  const double cth = std::cos(theta), sth = std::sin(theta);
  const double cpsi = std::cos(psi), spsi = std::sin(psi);
  Mat3 r;
  r << cpsi * cth, cpsi * sth * sphi - spsi * cphi, cpsi * sth * cphi + spsi * sphi,
       spsi * cth, spsi * sth * sphi + cpsi * cphi, spsi * sth * cphi - cpsi * sphi,
       -sth, cth * sphi, cth * cphi;
  return r;
}

Mat3 rotation_from_euler(const Vec3& angles) {
  return rotation_from_euler(angles.x(), angles.y(), angles.z());
}

Vec3 euler_from_rotation(const Mat3& r) {
  const double sth = -r(2, 0);
  if (sth >= 1.0 - 1e-12) {
    // theta = +pi/2, psi fixed to 0: R(0,1) = sin(phi), R(0,2) = cos(phi)
    return Vec3(std::atan2(r(0, 1), r(0, 2)), std::numbers::pi / 2.0, 0.0);
  }
  if (sth <= -1.0 + 1e-12) {
    // theta = -pi/2, psi fixed to 0: R(0,1) = -sin(phi), R(0,2) = -cos(phi)
    return Vec3(std::atan2(-r(0, 1), -r(0, 2)), -std::numbers::pi / 2.0, 0.0);
  }
  const double theta = std::asin(sth);
  const double phi = std::atan2(r(2, 1), r(2, 2));
  const double psi = std::atan2(r(1, 0), r(0, 0));
  return Vec3(phi, theta, psi);
}

Mat3 orthonormalized(const Mat3& r) {
  Mat3 out;
  const Vec3 x = r.col(0).normalized();
  const Vec3 y = (r.col(1) - r.col(1).dot(x) * x).normalized();
  out.col(0) = x;
  out.col(1) = y;
  out.col(2) = x.cross(y);
  return out;
}

}  // namespace quadsac
