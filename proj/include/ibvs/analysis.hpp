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

#ifndef IBVS_ANALYSIS_HPP_
#define IBVS_ANALYSIS_HPP_

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ibvs/control.hpp"
#include "ibvs/perception.hpp"
#include "ibvs/trajectory_log.hpp"

namespace ibvs {

// One verified inequality: value vs threshold, direction given by
// require_less (value < threshold) or not (value > threshold).
struct Assertion {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool require_less = true;
  bool pass = false;
};

std::string render_assertions(const std::vector<Assertion>& assertions);
void write_report(const std::vector<Assertion>& assertions,
                  const std::string& path);
bool all_pass(const std::vector<Assertion>& assertions);

// ---- Pointwise storage functions ----

/// L1(xi) = mean_i(||m_i - xi|| - ||m_i - c||), zero at the pad center c,
/// positive elsewhere; gradient along the pad-frame offset equals q_t.
double lyapunov_l1(const LandingPad& pad, const Vec3& xi);

/// L2 = L1 + v' (Kp/m)^-1 v / 2, the landing storage function with the
/// position gains converted to acceleration level.
double lyapunov_l2(const LandingPad& pad, const LandingGains& gains,
                   const VehicleParams& params, const Vec3& xi, const Vec3& v);

/// L3 = ||z||^2/2 + (kp/kd)^2 ||pi xi_w||^2 / 2 with
/// z = pi v + (kp/kd) pi xi_w, projections orthogonal to eta_w.
double lyapunov_l3(const WindowGains& gains, const UnitVec3& eta_w,
                   const Vec3& xi_w, const Vec3& v);

// ---- Trace recomputation from logged states ----

std::vector<std::pair<double, double>> lyapunov_landing(
    const TrajectoryLog& log, const LandingPad& pad, const LandingGains& gains,
    const VehicleParams& params);

std::vector<double> lyapunov_window(const TrajectoryLog& log,
                                    const WindowGains& gains,
                                    const UnitVec3& eta_w,
                                    const Vec3& window_center);

// ---- Landing verification ----

struct LandingTolerances {
  double terminal_d_t = 0.02;      // m
  double terminal_speed = 0.05;    // m/s
  double terminal_lateral = 0.05;  // m
  double terminal_offset = 0.05;   // m
  // Max positive per-step L2 increment; the assertion is only emitted when
  // finite. L2 descent holds when the outer-loop force is applied exactly,
  // so this is meaningful for attitude-aligned starts, not mode handovers.
  double dl2_step = std::numeric_limits<double>::infinity();
};

struct LandingReport {
  double terminal_t = 0.0;
  double terminal_d_t = 0.0;
  double terminal_speed = 0.0;
  double terminal_lateral = 0.0;
  double terminal_offset = 0.0;
  double min_d_t = 0.0;
  double min_beta = 0.0;
  double max_dl2_step = 0.0;
  double first_violation_t = -1.0;  // first d_t <= 0 sample, -1 if none
  std::vector<Assertion> assertions;
  bool pass = false;
};

/// Verifies the landing segment: d_t > 0 at every sample of the whole log,
/// beta_t > 0 during mode 3, bounded per-step L2 increments during mode 3,
/// and the terminal thresholds at the last mode-3 sample. Throws
/// SegmentMissing when the log has no mode-3 rows.
LandingReport check_landing(const TrajectoryLog& log, const LandingPad& pad,
                            const LandingTolerances& tol = {});

// ---- Crossing verification ----

struct CrossingMargins {
  double edge_margin = 0.05;  // min d_e on [t_w, t_lim) must exceed this
  double max_dot_do = 0.0;    // d(d_o)/dt at t_lim must be below this
};

struct CrossingReport {
  double t_w = -1.0;    // first ||q_w|| <= eps
  double t_lim = -1.0;  // first d_o <= 0
  double dot_do = 0.0;  // central-difference d(d_o)/dt at t_lim
  double min_d_o = 0.0;     // over [0, t_lim)
  double min_d_e = 0.0;     // over [t_w, t_lim)
  double max_q_w_in_w = 0.0;  // max ||q_w|| over [t_w, t_lim)
  bool in_w_held = false;
  std::vector<Assertion> assertions;
  bool pass = false;
};

/// Verifies the approach-and-crossing segment against the safety-region
/// guarantees. Throws NeverCrossed if d_o never reaches zero, NeverEntered
/// if ||q_w|| never reaches eps before the crossing.
CrossingReport check_crossing(const TrajectoryLog& log, double eps,
                              const CrossingMargins& margins = {});

// ---- Disturbance ultimate bounds ----

struct UltimateBound {
  double dxi_p = 0.0;  // root using the position gain kp12
  double dxi_d = 0.0;  // root using the damping gain kd12
};

/// Solves ||pi q_t(x dir, d_t -> 0+)|| = m ||pi delta_accel|| / k for the
/// lateral offset x, for k in {kp12, kd12}; dir is the in-plane disturbance
/// direction. Throws NoRoot when the target exceeds the feature authority.
UltimateBound ultimate_bound(const LandingPad& pad,
                             const VehicleParams& params,
                             const LandingGains& gains,
                             const Vec3& delta_accel);

/// Root of ||pi q_t(c + x dir - d eta, d)|| = target over x > 0, by
/// bisection to 1e-9 m. dir must be an in-plane unit vector.
double lateral_centroid_root(const LandingPad& pad, const Vec3& dir,
                             double target, double d_t = 1e-4);

}  // namespace ibvs

#endif  // IBVS_ANALYSIS_HPP_
