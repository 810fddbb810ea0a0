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

#include "ibvs/control.hpp"

#include <cmath>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

Mat3 LandingGains::kp_matrix(const UnitVec3& eta) const {
  return kp12 * eta.projector() +
         kp3 * eta.vec() * eta.vec().transpose();
}

Mat3 LandingGains::kd_matrix(const UnitVec3& eta) const {
  return kd12 * eta.projector() +
         kd3 * eta.vec() * eta.vec().transpose();
}

Vec3 landing_force(const Vec3& q_t, const Vec3& phi_t, const UnitVec3& eta_t,
                   const LandingGains& gains, const VehicleParams& params) {
  return gains.kp_matrix(eta_t) * q_t +
         gains.kd_matrix(eta_t) * (phi_t - gains.phi_star * eta_t.vec()) +
         params.hover_force();
}

double sigma(const Vec3& q_w, const UnitVec3& eta_w) {
  return eta_w.dot(q_w) >= 0.0 ? 0.0 : 1.0;
}

Vec3 window_force(const Vec3& qbar_w, const Vec3& phi_w, const Vec3& q_w,
                  const UnitVec3& eta_w, const WindowGains& gains,
                  const VehicleParams& params) {
  const double gate = sigma(q_w, eta_w);
  if (gate == 0.0) return Vec3::Zero();
  const Mat3 P = eta_w.projector();
  return gate * (gains.kp * (P * qbar_w) + gains.kd * (P * phi_w) +
                 gains.kphi * (eta_w.dot(phi_w) - gains.phi_star) *
                     eta_w.vec() +
                 params.hover_force());
}

bool GainReport::all_pass() const {
  for (const auto& c : conditions) {
    if (!c.pass) return false;
  }
  return true;
}

GainReport validate_gains(const LandingGains& landing,
                          const WindowGains& window, double r_w,
                          double window_delta_accel_max,
                          double landing_delta_accel_max) {
  GainReport report;

  GainCondition damping;
  damping.name = "window damping k_d^2/k_p > r_w/2";
  damping.value = window.kd * window.kd / window.kp;
  damping.threshold = 0.5 * r_w;
  damping.strict = true;
  damping.pass = damping.value > damping.threshold;
  report.conditions.push_back(damping);

  GainCondition flow_w;
  flow_w.name = "window flow phi_star > |eta'Delta|/k_phi + eps";
  flow_w.value = window.phi_star;
  flow_w.threshold = window_delta_accel_max / window.kphi + window.epsilon;
  flow_w.strict = true;
  flow_w.pass = flow_w.value > flow_w.threshold;
  report.conditions.push_back(flow_w);

  GainCondition flow_t;
  flow_t.name = "landing flow phi_star >= |eta'Delta|/k_d3";
  flow_t.value = landing.phi_star;
  flow_t.threshold = landing_delta_accel_max / landing.kd3;
  flow_t.strict = false;
  flow_t.pass = flow_t.value >= flow_t.threshold;
  report.conditions.push_back(flow_t);

  return report;
}

AttitudeSetpoint attitude_setpoint(const Vec3& force, double yaw) {
  const double magnitude = force.norm();
  if (magnitude < kForceFloor) {
    throw ZeroForce(fmt::format(
        "commanded force {:.4f} N below floor {:.2f} N", magnitude,
        kForceFloor));
  }
  const Vec3 b3 = force / magnitude;
  const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  const Vec3 b1_raw = orthogonal_projector(b3) * heading;
  if (b1_raw.norm() < kNormFloor) {
    throw YawSingularity("yaw heading is parallel to the thrust axis");
  }
  const Vec3 b1 = b1_raw.normalized();
  const Vec3 b2 = b3.cross(b1);
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b3;
  AttitudeSetpoint sp;
  sp.R_d = Rot3::from_matrix_unchecked(m);
  sp.thrust = magnitude;
  return sp;
}

Vec3 attitude_torque(const Rot3& R, const Vec3& omega, const Rot3& R_d,
                     const AttitudeGains& gains, const VehicleParams& params) {
  const Mat3 e = R_d.matrix().transpose() * R.matrix() -
                 R.matrix().transpose() * R_d.matrix();
  const Vec3 e_R = 0.5 * vee(e);
  return -gains.kR * e_R - gains.kOmega * omega +
         omega.cross(params.inertia * omega);
}

double boresight_yaw(const Vec3& boresight_body, const Vec3& look_dir) {
  const double bx = boresight_body.x(), by = boresight_body.y();
  const double lx = look_dir.x(), ly = look_dir.y();
  if (std::hypot(bx, by) < kNormFloor || std::hypot(lx, ly) < kNormFloor) {
    throw YawSingularity(
        "boresight or look direction has no horizontal component");
  }
  return std::atan2(ly, lx) - std::atan2(by, bx);
}

}  // namespace ibvs
