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

#ifndef IBVS_TRAJECTORY_LOG_HPP_
#define IBVS_TRAJECTORY_LOG_HPP_

#include <string>
#include <vector>

#include "ibvs/geometry.hpp"
#include "ibvs/mission.hpp"

namespace ibvs {

// One row per physics step. Vectors are inertial frame; attitude is logged
// as ZYX Euler angles in radians. F is the commanded outer-loop force,
// F_T the thrust magnitude actually applied, gamma the body torque.
struct LogRecord {
  double t = 0.0;
  int mode = 0;
  Vec3 xi = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  double yaw = 0.0, pitch = 0.0, roll = 0.0;
  Vec3 omega = Vec3::Zero();
  Vec3 F = Vec3::Zero();
  double F_T = 0.0;
  Vec3 gamma = Vec3::Zero();
  Vec3 q_t = Vec3::Zero();
  Vec3 q_w = Vec3::Zero();
  Vec3 qbar_w = Vec3::Zero();
  double alpha_w = 0.0;
  Vec3 phi_t = Vec3::Zero();
  Vec3 phi_w = Vec3::Zero();
  double d_t = 0.0, d_o = 0.0, d_e = 0.0;
  Vec3 eta_w = Vec3::Zero();
  double L1 = 0.0, L2 = 0.0, L3 = 0.0;
};

struct TrajectoryLog {
  std::vector<LogRecord> records;
  MissionEvents events;
  double dt = 1e-3;
};

/// The exact CSV header line (no newline).
extern const char kLogHeader[];

/// Writes the log: header, one line per record with 9 significant digits,
/// then a trailing `# events:` comment block.
void write_log_csv(const TrajectoryLog& log, const std::string& path);

/// Reads a log written by write_log_csv. Throws ParseError with a line
/// number on malformed input or a header mismatch.
TrajectoryLog read_log_csv(const std::string& path);

}  // namespace ibvs

#endif  // IBVS_TRAJECTORY_LOG_HPP_
