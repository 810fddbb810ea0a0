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

#ifndef IBVS_SCENARIO_HPP_
#define IBVS_SCENARIO_HPP_

#include <string>

#include "ibvs/dynamics.hpp"
#include "ibvs/mission.hpp"
#include "ibvs/perception.hpp"

namespace ibvs {

// How the initial rotation matrix is built from the scenario file.
enum class InitialAttitude {
  kLevel,    // R(0) = R_z(yaw)
  kAligned,  // R(0) matches the first commanded attitude setpoint
};

struct InitialConditions {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double yaw = 0.0;
  InitialAttitude attitude = InitialAttitude::kLevel;
};

struct SimParams {
  double dt = 1e-3;        // s, must lie in (0, 0.02]
  double duration = 30.0;  // s, >= 0
  double thrust_clamp = 0.0;  // N, 0 disables the clamp
  int control_decimation = 1;  // physics steps per control update
  int renorm_interval = 1000;  // steps between rotation re-orthonormalization
};

struct Scenario {
  std::string name = "unnamed";
  VehicleParams vehicle;
  SceneGeometry scene;
  InitialConditions initial;
  ControllerConfig control;
  DisturbanceModel disturbance;
  FeatureNoise noise;
  SimParams sim;
};

/// Parses a scenario from JSON text. Throws ParseError naming the first
/// missing or malformed key (e.g. "missing required key `vehicle.mass`").
Scenario scenario_from_json_text(const std::string& text);

/// Serializes a scenario to JSON text; round-trips value-identically
/// through scenario_from_json_text.
std::string scenario_to_json_text(const Scenario& s);

/// Reads and validates a scenario file.
Scenario load_scenario(const std::string& path);

/// Writes a scenario file.
void save_scenario(const Scenario& s, const std::string& path);

/// Full invariant check; throws ScenarioInvalid with the violated
/// constraint named. Covers vehicle positivity, pad/window geometry,
/// disturbance shape, step-size bounds, initial-condition side conditions
/// (d_t(0) > 0 and, with a window, d_o(0) > 0), and containment of the
/// ||q_w|| = epsilon level set inside the window safety disc.
void validate_scenario(const Scenario& s);

/// Largest ||xi_w|| on the level set ||q_w(xi_w)|| = eps over sampled
/// front-side directions. Used by validate_scenario; exposed for tests.
double level_set_max_radius(const WindowSpec& window, double eps,
                            int n_directions = 256);

}  // namespace ibvs

#endif  // IBVS_SCENARIO_HPP_
