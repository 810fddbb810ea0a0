// Copyright 2026 The ibvs_lander Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IBVS_CONTROL_HPP_
#define IBVS_CONTROL_HPP_

#include <string>
#include <vector>

#include "ibvs/dynamics.hpp"
#include "ibvs/geometry.hpp"

namespace ibvs {

// Commanded forces below this have no usable thrust direction.
inline constexpr double kForceFloor = 0.1;  // N

// Landing-law gains. The proportional/derivative matrices split the plane
// orthogonal to eta_t from the axis along it:
//   K_p = kp12 (I - eta eta') + kp3 eta eta', same shape for K_d.
struct LandingGains {
  double kp12 = 4.0;
  double kp3 = 1.75;
  double kd12 = 4.0;
  double kd3 = 4.0;
  double phi_star = 0.0;  // desired flow along eta_t, 1/s

  Mat3 kp_matrix(const UnitVec3& eta) const;
  Mat3 kd_matrix(const UnitVec3& eta) const;
};

// Window-approach gains plus the safety-region blend parameters.
struct WindowGains {
  double kp = 1.0;
  double kd = 0.8;
  double kphi = 1.0;
  double phi_star = 0.3;  // desired approach flow along eta_w, 1/s
  double epsilon = 0.2;   // safety-region radius on ||q_w||
  double delta = 0.05;    // blend band width
};

// Inner-loop geometric attitude gains.
struct AttitudeGains {
  double kR = 5.0;
  double kOmega = 0.5;
};

// Outer-loop output: a desired force vector and the yaw to hold.
struct ForceCommand {
  Vec3 force = Vec3::Zero();
  double yaw = 0.0;
};

struct AttitudeSetpoint {
  Rot3 R_d;
  double thrust = 0.0;  // N, ||F||
};

/// Landing force F = K_p q_t + K_d (phi_t - eta_t phi_star) + m g e3.
Vec3 landing_force(const Vec3& q_t, const Vec3& phi_t, const UnitVec3& eta_t,
                   const LandingGains& gains, const VehicleParams& params);

/// Crossing gate: 1 before the window plane (eta_w' q_w < 0), 0 at or past
/// it.
double sigma(const Vec3& q_w, const UnitVec3& eta_w);

/// Window-approach force
///   F = sigma(q_w) [k_p P qbar_w + k_d P phi_w
///                   + k_phi eta (eta' phi_w - phi_star) + m g e3],
/// with P the projector orthogonal to eta_w.
Vec3 window_force(const Vec3& qbar_w, const Vec3& phi_w, const Vec3& q_w,
                  const UnitVec3& eta_w, const WindowGains& gains,
                  const VehicleParams& params);

// One validated inequality: pass iff value is on the feasible side of the
// threshold (margin = value - threshold for lower bounds).
struct GainCondition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool strict = true;  // strict inequality required
  bool pass = false;

  double margin() const { return value - threshold; }
};

struct GainReport {
  std::vector<GainCondition> conditions;

  bool all_pass() const;
};

/// Sufficient-condition checks, in the normalized (unit-mass) form the
/// closed-loop analysis uses:
///   window damping   k_d^2 / k_p > r_w / 2          (strict)
///   window flow      phi_star_w > |eta_w' Delta|/k_phi + eps   (strict)
///   landing flow     phi_star_t >= |eta_t' Delta|/k_d3         (inclusive)
/// Disturbance bounds are given at acceleration level (|eta' Delta| / m).
GainReport validate_gains(const LandingGains& landing,
                          const WindowGains& window, double r_w,
                          double window_delta_accel_max,
                          double landing_delta_accel_max);

/// Desired attitude from a force command: third body axis along F/||F||,
/// first axis the yaw heading (cos yaw, sin yaw, 0) projected orthogonal to
/// it (Gram-Schmidt), second completing the right-handed triad. Throws
/// ZeroForce below kForceFloor and YawSingularity when the heading is
/// parallel to the thrust axis.
AttitudeSetpoint attitude_setpoint(const Vec3& force, double yaw);

/// Geometric attitude PD with gyroscopic feed-forward:
///   Gamma = -kR e_R - kOmega Omega + Omega x I Omega,
///   e_R = 0.5 vee(R_d' R - R' R_d).
Vec3 attitude_torque(const Rot3& R, const Vec3& omega, const Rot3& R_d,
                     const AttitudeGains& gains, const VehicleParams& params);

/// Yaw that points a camera boresight (unit vector in the body frame) along
/// a desired horizontal look direction when the vehicle is level. Throws
/// YawSingularity when either horizontal projection vanishes.
double boresight_yaw(const Vec3& boresight_body, const Vec3& look_dir);

}  // namespace ibvs

#endif  // IBVS_CONTROL_HPP_
