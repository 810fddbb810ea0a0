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

#include "ibvs/simulator.hpp"

#include <cmath>

#include "ibvs/analysis.hpp"
#include "ibvs/errors.hpp"
#include "ibvs/rng.hpp"

namespace ibvs {
namespace {

struct StateDeriv {
  Vec3 xi_dot, v_dot, omega_dot;
};

StateDeriv derivative(const VehicleState& base, const Vec3& v,
                      const Vec3& omega, const Wrench& wrench,
                      const DisturbanceModel& dist, const VehicleParams& p,
                      double t) {
  StateDeriv d;
  d.xi_dot = v;
  d.v_dot = translational_derivative(p, base.R, wrench.thrust,
                                     disturbance_at(dist, t));
  d.omega_dot = rotational_derivative(p, omega, wrench.torque);
  return d;
}

LogRecord make_record(double t, Mode mode, const VehicleState& st,
                      const FeatureSnapshot& snap, const ForceCommand& cmd,
                      double thrust, const Vec3& torque,
                      const Scenario& sc) {
  LogRecord r;
  r.t = t;
  r.mode = static_cast<int>(mode);
  r.xi = st.xi;
  r.v = st.v;
  const Vec3 ypr = st.R.euler_zyx();
  r.yaw = ypr.x();
  r.pitch = ypr.y();
  r.roll = ypr.z();
  r.omega = st.omega;
  r.F = cmd.force;
  r.F_T = thrust;
  r.gamma = torque;
  r.q_t = snap.q_t;
  r.q_w = snap.q_w;
  r.qbar_w = snap.qbar_w;
  r.alpha_w = snap.alpha_w;
  r.phi_t = snap.phi_t;
  r.phi_w = snap.phi_w;
  r.d_t = snap.d_t;
  r.d_o = snap.d_o;
  r.d_e = snap.d_e;
  r.eta_w = snap.has_window ? snap.frame.eta.vec() : Vec3::Zero();
  r.L1 = lyapunov_l1(sc.scene.pad, st.xi);
  r.L2 = lyapunov_l2(sc.scene.pad, sc.control.landing, sc.vehicle, st.xi,
                     st.v);
  if (sc.scene.window.has_value()) {
    r.L3 = lyapunov_l3(sc.control.window, sc.scene.window->normal,
                       st.xi - sc.scene.window->center, st.v);
  }
  return r;
}

Rot3 initial_rotation(const Scenario& sc) {
  const Rot3 level = Rot3::rot_z(sc.initial.yaw);
  if (sc.initial.attitude == InitialAttitude::kLevel) return level;

  // Aligned start: evaluate the first command from a level pose and adopt
  // its attitude setpoint, discarding the scratch mission/noise state.
  VehicleState st;
  st.xi = sc.initial.position;
  st.v = sc.initial.velocity;
  st.R = level;
  Rng scratch_rng(sc.noise.seed);
  MissionState scratch = MissionState::start(
      sc.scene.window.has_value(),
      ForceCommand{sc.vehicle.hover_force(), sc.initial.yaw});
  try {
    const FeatureSnapshot snap =
        snapshot(st, sc.scene, sc.noise, sc.control.window.epsilon,
                 sc.control.window.delta, scratch_rng, 0.0);
    const ForceCommand cmd =
        mission_step(scratch, snap, sc.scene, sc.control, sc.vehicle, 0.0);
    return attitude_setpoint(cmd.force, cmd.yaw).R_d;
  } catch (const Error&) {
    return level;
  }
}

}  // namespace

VehicleState rk4_step(const VehicleState& state, const Wrench& wrench,
                      const DisturbanceModel& disturbance,
                      const VehicleParams& params, double t, double dt) {
  if (dt <= 0.0) throw ScenarioInvalid("rk4_step requires dt > 0");
  const double h = dt;

  const StateDeriv k1 =
      derivative(state, state.v, state.omega, wrench, disturbance, params, t);
  const StateDeriv k2 = derivative(
      state, state.v + 0.5 * h * k1.v_dot, state.omega + 0.5 * h * k1.omega_dot,
      wrench, disturbance, params, t + 0.5 * h);
  const StateDeriv k3 = derivative(
      state, state.v + 0.5 * h * k2.v_dot, state.omega + 0.5 * h * k2.omega_dot,
      wrench, disturbance, params, t + 0.5 * h);
  const StateDeriv k4 =
      derivative(state, state.v + h * k3.v_dot, state.omega + h * k3.omega_dot,
                 wrench, disturbance, params, t + h);

  VehicleState next;
  next.xi = state.xi + (h / 6.0) * (k1.xi_dot + 2.0 * k2.xi_dot +
                                    2.0 * k3.xi_dot + k4.xi_dot);
  next.v = state.v +
           (h / 6.0) * (k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot);
  next.omega = state.omega + (h / 6.0) * (k1.omega_dot + 2.0 * k2.omega_dot +
                                          2.0 * k3.omega_dot + k4.omega_dot);

  // Stage-averaged body rate advances the rotation on the group.
  const Vec3 w1 = state.omega;
  const Vec3 w2 = state.omega + 0.5 * h * k1.omega_dot;
  const Vec3 w3 = state.omega + 0.5 * h * k2.omega_dot;
  const Vec3 w4 = state.omega + h * k3.omega_dot;
  const Vec3 w_avg = (w1 + 2.0 * w2 + 2.0 * w3 + w4) / 6.0;
  next.R = rotate_integrate(state.R, w_avg, h);
  return next;
}

TrajectoryLog run_scenario(const Scenario& sc) {
  validate_scenario(sc);

  TrajectoryLog log;
  log.dt = sc.sim.dt;

  VehicleState st;
  st.xi = sc.initial.position;
  st.v = sc.initial.velocity;
  st.R = initial_rotation(sc);
  st.omega = Vec3::Zero();

  Rng rng(sc.noise.seed);
  MissionState ms = MissionState::start(
      sc.scene.window.has_value(),
      ForceCommand{sc.vehicle.hover_force(), sc.initial.yaw});

  const double dt = sc.sim.dt;
  const long n_steps = std::lround(sc.sim.duration / dt);

  ForceCommand cmd = ms.last_cmd;
  Rot3 r_d = st.R;
  bool aborted = false;

  for (long i = 0;; ++i) {
    const double t = i * dt;
    const FeatureSnapshot snap =
        snapshot(st, sc.scene, sc.noise, sc.control.window.epsilon,
                 sc.control.window.delta, rng, t);

    if (i % sc.sim.control_decimation == 0 && !aborted) {
      try {
        cmd = mission_step(ms, snap, sc.scene, sc.control, sc.vehicle, t);
      } catch (const MissionAbort&) {
        aborted = true;  // reason already recorded in ms.events
      }
    }

    double thrust;
    try {
      const AttitudeSetpoint sp = attitude_setpoint(cmd.force, cmd.yaw);
      r_d = sp.R_d;
      thrust = sp.thrust;
    } catch (const ZeroForce&) {
      thrust = cmd.force.norm();  // hold the previous attitude setpoint
    }
    if (sc.sim.thrust_clamp > 0.0) {
      thrust = std::min(thrust, sc.sim.thrust_clamp);
    }
    const Vec3 torque =
        attitude_torque(st.R, st.omega, r_d, sc.control.attitude, sc.vehicle);

    log.records.push_back(
        make_record(t, ms.mode, st, snap, cmd, thrust, torque, sc));
    log.events = ms.events;

    if (aborted) break;
    if (snap.d_t <= kContactHeight) {
      log.events.touchdown = t;
      break;
    }
    if (ms.mode == Mode::kShutdown && ms.events.t4.has_value() &&
        t - *ms.events.t4 >= sc.control.mission.ramp_time - 1e-12) {
      break;
    }
    if (i >= n_steps) break;

    st = rk4_step(st, Wrench{thrust, torque}, sc.disturbance, sc.vehicle, t,
                  dt);
    if ((i + 1) % sc.sim.renorm_interval == 0) {
      st.R = st.R.renormalized();
    }
  }
  return log;
}

}  // namespace ibvs
