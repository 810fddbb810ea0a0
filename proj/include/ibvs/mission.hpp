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

#ifndef IBVS_MISSION_HPP_
#define IBVS_MISSION_HPP_

#include <array>
#include <optional>
#include <string>

#include "ibvs/control.hpp"
#include "ibvs/perception.hpp"

namespace ibvs {

// Mission phases, in the only order they can occur. Landing-only scenarios
// start directly in kLand.
enum class Mode : int {
  kApproachWindow = 1,  // closed-loop window servo
  kCrossWindow = 2,     // open-loop push through the plane
  kLand = 3,            // closed-loop pad servo, latched
  kShutdown = 4,        // thrust ramp to zero
};

struct MissionConfig {
  double lat_threshold = 0.05;     // shutdown gate on ||P q_t||
  double beta_touchdown = 0.24;    // shutdown gate: beta_t at or below this
  double hold_time = 0.2;          // s both gates must hold before shutdown
  double ramp_time = 1.0;          // s of linear thrust ramp in mode 4
  double grace_time = 0.1;         // s of command freeze on feature loss
  double corner_jump_threshold = 0.0873;  // rad/frame window-loss detector
  bool mode2_literal = false;      // drop the crossing gravity compensation
};

struct ControllerConfig {
  LandingGains landing;
  WindowGains window;
  AttitudeGains attitude;
  MissionConfig mission;
};

struct MissionEvents {
  std::optional<double> t1, t2, t3, t4;
  std::optional<double> touchdown;
  std::optional<double> abort;
  std::string abort_reason;
};

struct MissionState {
  Mode mode = Mode::kLand;
  MissionEvents events;

  ForceCommand last_cmd;
  bool seen_window = false;
  bool have_prev_bearings = false;
  std::array<Vec3, 4> prev_bearings;
  Vec3 last_window_force = Vec3::Zero();
  Vec3 eta_memo = Vec3::UnitX();
  Vec3 f_memo = Vec3::Zero();
  double yaw_hold = 0.0;
  double proximity_since = -1.0;
  double loss_since = -1.0;
  double shutdown_thrust = 0.0;

  /// Initial state: mode 1 when the scene has a window, mode 3 otherwise.
  /// hold_cmd seeds the command reused if features are missing at start.
  static MissionState start(bool has_window, const ForceCommand& hold_cmd,
                            double t0 = 0.0);
};

/// One decision step: consumes the snapshot, advances the mode machine and
/// returns the force command for this control period. Throws MissionAbort
/// when a closed-loop mode has had no usable features for longer than the
/// grace time.
ForceCommand mission_step(MissionState& ms, const FeatureSnapshot& snap,
                          const SceneGeometry& scene,
                          const ControllerConfig& cfg,
                          const VehicleParams& params, double t);

}  // namespace ibvs

#endif  // IBVS_MISSION_HPP_
