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

#include "ibvs/dynamics.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

void DisturbanceModel::validate() const {
  if (kind == Kind::kHorizontalConstant) {
    const double along = std::abs(horizontal_reference.dot(amplitude));
    if (along > 1e-12) {
      throw ScenarioInvalid(fmt::format(
          "horizontal disturbance has {:.3e} N along its reference direction",
          along));
    }
  }
}

Vec3 disturbance_at(const DisturbanceModel& model, double t) {
  switch (model.kind) {
    case DisturbanceModel::Kind::kZero:
      return Vec3::Zero();
    case DisturbanceModel::Kind::kConstant:
    case DisturbanceModel::Kind::kHorizontalConstant:
      return model.amplitude;
    case DisturbanceModel::Kind::kSinusoid:
      return model.amplitude *
             std::sin(2.0 * std::numbers::pi * model.frequency * t +
                      model.phase);
  }
  return Vec3::Zero();
}

Vec3 translational_derivative(const VehicleParams& params, const Rot3& R,
                              double thrust, const Vec3& delta) {
  const Vec3 force = -thrust * (R * Vec3::UnitZ()) +
                     params.mass * params.gravity * Vec3::UnitZ() + delta;
  return force / params.mass;
}

Vec3 rotational_derivative(const VehicleParams& params, const Vec3& omega,
                           const Vec3& torque) {
  const Vec3 momentum = params.inertia * omega;
  return params.inertia.ldlt().solve(-omega.cross(momentum) + torque);
}

}  // namespace ibvs
