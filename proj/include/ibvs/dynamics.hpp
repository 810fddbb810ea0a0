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

#ifndef IBVS_DYNAMICS_HPP_
#define IBVS_DYNAMICS_HPP_

#include "ibvs/geometry.hpp"

namespace ibvs {

// Inertial frame convention: e3 points down, so gravity is +m g e3 and a
// vehicle above the origin has negative third coordinate. The body frame
// matches at hover (body e3 toward the belly); thrust acts along -R e3.

struct VehicleParams {
  double mass = 1.676;           // kg
  double gravity = 9.81;         // m/s^2
  Mat3 inertia = Vec3(0.01, 0.01, 0.02).asDiagonal();  // kg m^2

  Vec3 hover_force() const { return Vec3(0, 0, mass * gravity); }
};

struct VehicleState {
  Vec3 xi = Vec3::Zero();     // position, inertial
  Vec3 v = Vec3::Zero();      // velocity, inertial
  Rot3 R;                     // body-to-inertial attitude
  Vec3 omega = Vec3::Zero();  // body rates
};

// Inner-loop output applied to the rigid body: scalar thrust along -R e3
// plus a body torque.
struct Wrench {
  double thrust = 0.0;  // N, >= 0
  Vec3 torque = Vec3::Zero();  // N m, body frame
};

// External disturbance force Delta(t), inertial frame.
struct DisturbanceModel {
  enum class Kind { kZero, kConstant, kSinusoid, kHorizontalConstant };

  Kind kind = Kind::kZero;
  Vec3 amplitude = Vec3::Zero();  // N
  double frequency = 0.0;         // Hz, sinusoid only
  double phase = 0.0;             // rad, sinusoid only
  // kHorizontalConstant promises amplitude orthogonal to this direction.
  UnitVec3 horizontal_reference = UnitVec3(Vec3::UnitZ());

  /// Throws ScenarioInvalid if a kHorizontalConstant amplitude has more than
  /// 1e-12 N along the reference direction.
  void validate() const;
};

/// Delta(t) in newtons.
Vec3 disturbance_at(const DisturbanceModel& model, double t);

/// v_dot = (-thrust R e3 + m g e3 + Delta) / m.
Vec3 translational_derivative(const VehicleParams& params, const Rot3& R,
                              double thrust, const Vec3& delta);

/// omega_dot = I^-1 (-omega x I omega + torque).
Vec3 rotational_derivative(const VehicleParams& params, const Vec3& omega,
                           const Vec3& torque);

}  // namespace ibvs

#endif  // IBVS_DYNAMICS_HPP_
