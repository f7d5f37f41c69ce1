#pragma once

#include <Eigen/Dense>

#include <array>

namespace quadsac {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Per-rotor thrust map: Tr(pwm) = a2*pwm^2 + a1*pwm + a0, pwm in [-100, 100].
struct ThrustCoeffs {
  double a2 = 1.5618e-4;  // N / pwm^2
  double a1 = 1.0395e-2;  // N / pwm
  double a0 = 0.13894;    // N
};

struct QuadParams {
  double mass = 0.45;                          // kg
  Vec3 inertia_diag{2.4e-3, 2.4e-3, 4.5e-3};   // kg m^2, body axes
  double arm_length = 0.178;                   // m, hub center to rotor
  double gravity = 9.81;                       // m/s^2
  ThrustCoeffs thrust_coeffs;
  double yaw_torque_coeff = 0.016;             // N m of yaw per N of thrust
  double linear_drag_coeff = 0.1;              // N s/m
  double angular_drag_coeff = 0.01;            // N m s/rad
  int physics_substeps = 10;                   // per control step
  bool clamp_thrust_at_zero = false;           // Tr() dips to ~-0.034 N near pwm = -33

  void validate() const;  // throws std::invalid_argument on bad values
};

// World frame: z up. Body frame: x forward, y left, z up.
// `rotation` maps body coordinates to world coordinates.
struct RigidState {
  Vec3 position = Vec3::Zero();   // m, world
  Mat3 rotation = Mat3::Identity();
  Vec3 lin_vel = Vec3::Zero();    // m/s, world
  Vec3 ang_vel = Vec3::Zero();    // rad/s, body
};

// Motor order: 0 front-left, 1 front-right, 2 rear-right, 3 rear-left,
// each offset arm_length from the hub along the body-frame diagonals.
// Front-left/rear-right spin one way, front-right/rear-left the other,
// so the yaw moment is yaw_torque_coeff * (T0 - T1 + T2 - T3).
struct MotorCommand {
  std::array<double, 4> pwm{0.0, 0.0, 0.0, 0.0};
};

double thrust_from_pwm(double pwm, const ThrustCoeffs& c);

// pwm at which 4*Tr(pwm) = mass*gravity (larger root of the quadratic).
double hover_pwm(const QuadParams& p);

// Advances the rigid body by dt_control seconds using physics_substeps
// velocity-first substeps. Throws std::invalid_argument on non-finite
// state or command entries. Pure function of its inputs.
RigidState step_physics(const RigidState& state, const MotorCommand& cmd,
                        const QuadParams& params, double dt_control);

// Z-Y-X intrinsic (yaw-pitch-roll): R = Rz(psi) * Ry(theta) * Rx(phi).
// Returns (phi, theta, psi); at |theta| = pi/2 picks the psi = 0 representative.
Vec3 euler_from_rotation(const Mat3& rotation);
Mat3 rotation_from_euler(double phi, double theta, double psi);
Mat3 rotation_from_euler(const Vec3& angles);

// Gram-Schmidt on the body axes; keeps det = +1.
Mat3 orthonormalized(const Mat3& r);

}  // namespace quadsac
