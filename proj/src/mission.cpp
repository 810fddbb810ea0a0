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

#include "ibvs/mission.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {
namespace {

// Freeze the last command while features are missing; abort once the
// outage exceeds the grace window. Returns the command to hold.
ForceCommand hold_or_abort(MissionState& ms, const MissionConfig& cfg,
                           double t, const char* what) {
  if (ms.loss_since < 0.0) ms.loss_since = t;
  if (t - ms.loss_since >= cfg.grace_time) {
    ms.events.abort = t;
    ms.events.abort_reason = what;
    throw MissionAbort(fmt::format("{} at t={:.3f}s", what, t));
  }
  return ms.last_cmd;
}

// Open-loop crossing force: keep only the remembered push along the window
// normal, plus weight compensation for whatever gravity component the push
// cannot supply. The command convention is m*dv/dt = -F + m*g*e3, so the
// push that carries the vehicle through the opening is a negative component
// along eta (eta points from the approach side into the far room). The
// literal variant applies eta*|eta.F| verbatim with no compensation; it
// stalls short of the plane and sheds altitude.
Vec3 crossing_force(const MissionState& ms, const MissionConfig& cfg,
                    const VehicleParams& params) {
  const double push = std::abs(ms.eta_memo.dot(ms.last_window_force));
  if (cfg.mode2_literal) return ms.eta_memo * push;
  Vec3 f = ms.eta_memo * -push;
  const double along = std::abs(ms.eta_memo.dot(Vec3::UnitZ()));
  f += Vec3::UnitZ() * (params.mass * params.gravity * (1.0 - along));
  return f;
}

ForceCommand land_step(MissionState& ms, const FeatureSnapshot& snap,
                       const SceneGeometry& scene, const ControllerConfig& cfg,
                       const VehicleParams& params, double t) {
  if (!snap.pad_visible) {
    ms.proximity_since = -1.0;
    return hold_or_abort(ms, cfg.mission, t, "pad features lost in landing");
  }
  ms.loss_since = -1.0;

  const Vec3 f = landing_force(snap.q_t, snap.phi_t, scene.pad.normal,
                               cfg.landing, params);
  ms.last_cmd = ForceCommand{f, ms.yaw_hold};

  const double lateral = (scene.pad.normal.projector() * snap.q_t).norm();
  const bool close = lateral < cfg.mission.lat_threshold &&
                     snap.beta_t > 0.0 &&
                     snap.beta_t <= cfg.mission.beta_touchdown;
  if (!close) {
    ms.proximity_since = -1.0;
    return ms.last_cmd;
  }
  if (ms.proximity_since < 0.0) ms.proximity_since = t;
  if (t - ms.proximity_since >= cfg.mission.hold_time) {
    ms.mode = Mode::kShutdown;
    ms.events.t4 = t;
    ms.shutdown_thrust = f.norm();
  }
  return ms.last_cmd;
}

ForceCommand shutdown_step(MissionState& ms, const MissionConfig& cfg,
                           double t) {
  const double elapsed = t - *ms.events.t4;
  const double scale =
      std::clamp(1.0 - elapsed / cfg.ramp_time, 0.0, 1.0);
  // Force along +z commands a level attitude; magnitude ramps to zero.
  ms.last_cmd = ForceCommand{Vec3::UnitZ() * (ms.shutdown_thrust * scale),
                             ms.yaw_hold};
  return ms.last_cmd;
}

}  // namespace

MissionState MissionState::start(bool has_window, const ForceCommand& hold_cmd,
                                 double t0) {
  MissionState ms;
  ms.last_cmd = hold_cmd;
  ms.yaw_hold = hold_cmd.yaw;
  if (has_window) {
    ms.mode = Mode::kApproachWindow;
    ms.events.t1 = t0;
  } else {
    ms.mode = Mode::kLand;
    ms.events.t3 = t0;
  }
  return ms;
}

ForceCommand mission_step(MissionState& ms, const FeatureSnapshot& snap,
                          const SceneGeometry& scene,
                          const ControllerConfig& cfg,
                          const VehicleParams& params, double t) {
  switch (ms.mode) {
    case Mode::kApproachWindow: {
      bool lost = !snap.window_visible;
      if (!lost && ms.have_prev_bearings &&
          window_loss_detector(ms.prev_bearings, snap.corner_bearings,
                               cfg.mission.corner_jump_threshold)) {
        lost = true;
      }
      if (!lost) {
        ms.seen_window = true;
        ms.loss_since = -1.0;
        ms.prev_bearings = snap.corner_bearings;
        ms.have_prev_bearings = true;
        const UnitVec3 eta(snap.frame.eta);
        const Vec3 f = window_force(snap.qbar_w, snap.phi_w, snap.q_w, eta,
                                    cfg.window, params);
        ms.last_window_force = f;
        ms.eta_memo = eta.vec();
        const Vec3 boresight = scene.forward.mount.matrix() * Vec3::UnitZ();
        ms.last_cmd = ForceCommand{f, boresight_yaw(boresight, eta.vec())};
        return ms.last_cmd;
      }
      if (!ms.seen_window) {
        return hold_or_abort(ms, cfg.mission, t,
                             "window never acquired in approach");
      }
      ms.mode = Mode::kCrossWindow;
      ms.events.t2 = t;
      ms.f_memo = crossing_force(ms, cfg.mission, params);
      ms.last_cmd = ForceCommand{ms.f_memo, ms.last_cmd.yaw};
      return ms.last_cmd;
    }

    case Mode::kCrossWindow: {
      if (snap.pad_visible) {
        ms.mode = Mode::kLand;
        ms.events.t3 = t;
        ms.yaw_hold = ms.last_cmd.yaw;
        ms.loss_since = -1.0;
        return land_step(ms, snap, scene, cfg, params, t);
      }
      ms.last_cmd = ForceCommand{ms.f_memo, ms.last_cmd.yaw};
      return ms.last_cmd;
    }

    case Mode::kLand:
      return land_step(ms, snap, scene, cfg, params, t);

    case Mode::kShutdown:
      return shutdown_step(ms, cfg.mission, t);
  }
  throw Error("unreachable mission mode");
}

}  // namespace ibvs
