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

#ifndef IBVS_SIMULATOR_HPP_
#define IBVS_SIMULATOR_HPP_

#include "ibvs/dynamics.hpp"
#include "ibvs/scenario.hpp"
#include "ibvs/trajectory_log.hpp"

namespace ibvs {

// Height above the pad plane at which a run counts as touched down. Kept
// above zero so every logged sample satisfies d_t > 0.
inline constexpr double kContactHeight = 0.003;  // m

/// Classical 4-stage step on (xi, v, omega). The rotation is held fixed
/// while stage derivatives are evaluated (the wrench is a zero-order hold),
/// then advanced by the exponential of the stage-averaged body rate. The
/// disturbance is evaluated at the stage times t, t+dt/2, t+dt.
VehicleState rk4_step(const VehicleState& state, const Wrench& wrench,
                      const DisturbanceModel& disturbance,
                      const VehicleParams& params, double t, double dt);

/// Runs a full closed-loop scenario:
///   snapshot -> mission_step -> attitude_setpoint -> attitude_torque -> rk4.
/// Logs every physics step. Terminates at the configured duration, at
/// mode-4 ramp completion, at ground contact (d_t <= kContactHeight), or on
/// MissionAbort (recorded in the log events, not rethrown). Deterministic
/// for a fixed scenario including its seed.
TrajectoryLog run_scenario(const Scenario& scenario);

}  // namespace ibvs

#endif  // IBVS_SIMULATOR_HPP_
