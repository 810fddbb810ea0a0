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

#include "ibvs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

std::string render_assertions(const std::vector<Assertion>& assertions) {
  std::string out;
  for (const Assertion& a : assertions) {
    out += fmt::format("{} value={:.9g} threshold{}{:.9g} {}\n", a.name,
                       a.value, a.require_less ? "<" : ">", a.threshold,
                       a.pass ? "PASS" : "FAIL");
  }
  return out;
}

void write_report(const std::vector<Assertion>& assertions,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write report file `{}`", path));
  out << render_assertions(assertions);
}

bool all_pass(const std::vector<Assertion>& assertions) {
  return std::all_of(assertions.begin(), assertions.end(),
                     [](const Assertion& a) { return a.pass; });
}

namespace {

Assertion make_assertion(std::string name, double value, double threshold,
                         bool require_less) {
  Assertion a;
  a.name = std::move(name);
  a.value = value;
  a.threshold = threshold;
  a.require_less = require_less;
  a.pass = require_less ? (value < threshold) : (value > threshold);
  return a;
}

}  // namespace

double lyapunov_l1(const LandingPad& pad, const Vec3& xi) {
  const Vec3 c = pad.center();
  double acc = 0.0;
  for (const Vec3& m : pad.markers) {
    acc += (m - xi).norm() - (m - c).norm();
  }
  return acc / static_cast<double>(pad.markers.size());
}

double lyapunov_l2(const LandingPad& pad, const LandingGains& gains,
                   const VehicleParams& params, const Vec3& xi,
                   const Vec3& v) {
  // (Kp/m)^-1 = m (pi/kp12 + eta eta'/kp3).
  const Mat3 pi = pad.normal.projector();
  const Vec3 eta = pad.normal.vec();
  const Mat3 kp_inv =
      params.mass * (pi / gains.kp12 + (eta * eta.transpose()) / gains.kp3);
  return lyapunov_l1(pad, xi) + 0.5 * v.dot(kp_inv * v);
}

double lyapunov_l3(const WindowGains& gains, const UnitVec3& eta_w,
                   const Vec3& xi_w, const Vec3& v) {
  const Mat3 pi = eta_w.projector();
  const double ratio = gains.kp / gains.kd;
  const Vec3 pxi = pi * xi_w;
  const Vec3 z = pi * v + ratio * pxi;
  return 0.5 * z.squaredNorm() + 0.5 * ratio * ratio * pxi.squaredNorm();
}

std::vector<std::pair<double, double>> lyapunov_landing(
    const TrajectoryLog& log, const LandingPad& pad, const LandingGains& gains,
    const VehicleParams& params) {
  std::vector<std::pair<double, double>> trace;
  trace.reserve(log.records.size());
  for (const LogRecord& r : log.records) {
    trace.emplace_back(lyapunov_l1(pad, r.xi),
                       lyapunov_l2(pad, gains, params, r.xi, r.v));
  }
  return trace;
}

std::vector<double> lyapunov_window(const TrajectoryLog& log,
                                    const WindowGains& gains,
                                    const UnitVec3& eta_w,
                                    const Vec3& window_center) {
  std::vector<double> trace;
  trace.reserve(log.records.size());
  for (const LogRecord& r : log.records) {
    trace.push_back(lyapunov_l3(gains, eta_w, r.xi - window_center, r.v));
  }
  return trace;
}

LandingReport check_landing(const TrajectoryLog& log, const LandingPad& pad,
                            const LandingTolerances& tol) {
  LandingReport rep;
  const LogRecord* terminal = nullptr;
  rep.min_d_t = std::numeric_limits<double>::infinity();
  rep.min_beta = std::numeric_limits<double>::infinity();
  rep.max_dl2_step = -std::numeric_limits<double>::infinity();

  const Vec3 eta_t = pad.normal.vec();
  bool have_prev_l2 = false;
  double prev_l2 = 0.0;
  bool positive = true;
  for (const LogRecord& r : log.records) {
    rep.min_d_t = std::min(rep.min_d_t, r.d_t);
    if (r.d_t <= 0.0 && rep.first_violation_t < 0.0) {
      rep.first_violation_t = r.t;
      positive = false;
    }
    if (r.mode == static_cast<int>(Mode::kLand)) {
      terminal = &r;
      rep.min_beta = std::min(rep.min_beta, -eta_t.dot(r.q_t));
      if (have_prev_l2) {
        rep.max_dl2_step = std::max(rep.max_dl2_step, r.L2 - prev_l2);
      }
      prev_l2 = r.L2;
      have_prev_l2 = true;
    } else {
      have_prev_l2 = false;
    }
  }
  if (terminal == nullptr) {
    throw SegmentMissing("log contains no mode-3 (landing) records");
  }
  if (!std::isfinite(rep.max_dl2_step)) rep.max_dl2_step = 0.0;

  const Vec3 c = pad.center();
  const Vec3 offset = terminal->xi - c;
  rep.terminal_t = terminal->t;
  rep.terminal_d_t = terminal->d_t;
  rep.terminal_speed = terminal->v.norm();
  rep.terminal_lateral = (pad.normal.projector() * offset).norm();
  rep.terminal_offset = offset.norm();

  rep.assertions.push_back(make_assertion(
      "landing d_t min over log", rep.min_d_t, 0.0, false));
  rep.assertions.push_back(make_assertion(
      "landing beta_t min in mode 3", rep.min_beta, 0.0, false));
  // The per-step L2 bound assumes the commanded force is applied exactly;
  // callers opt in (finite tolerance) for runs that start attitude-aligned.
  if (std::isfinite(tol.dl2_step)) {
    rep.assertions.push_back(make_assertion(
        "landing max per-step dL2 in mode 3", rep.max_dl2_step, tol.dl2_step,
        true));
  }
  rep.assertions.push_back(make_assertion(
      "landing terminal d_t", rep.terminal_d_t, tol.terminal_d_t, true));
  rep.assertions.push_back(make_assertion(
      "landing terminal speed", rep.terminal_speed, tol.terminal_speed, true));
  rep.assertions.push_back(make_assertion("landing terminal lateral offset",
                                          rep.terminal_lateral,
                                          tol.terminal_lateral, true));
  rep.assertions.push_back(make_assertion("landing terminal offset",
                                          rep.terminal_offset,
                                          tol.terminal_offset, true));
  rep.pass = positive && all_pass(rep.assertions);
  return rep;
}

CrossingReport check_crossing(const TrajectoryLog& log, double eps,
                              const CrossingMargins& margins) {
  CrossingReport rep;
  const auto& rec = log.records;
  std::size_t i_lim = rec.size();
  for (std::size_t i = 0; i < rec.size(); ++i) {
    if (rec[i].d_o <= 0.0) {
      i_lim = i;
      break;
    }
  }
  if (i_lim == rec.size()) {
    throw NeverCrossed("d_o never reached zero: no crossing in the log");
  }
  rep.t_lim = rec[i_lim].t;

  std::size_t i_w = rec.size();
  for (std::size_t i = 0; i < i_lim; ++i) {
    if (rec[i].q_w.norm() <= eps) {
      i_w = i;
      break;
    }
  }
  if (i_w == rec.size()) {
    throw NeverEntered(fmt::format(
        "||q_w|| never reached eps={:.3g} before the crossing at t={:.3f}s",
        eps, rep.t_lim));
  }
  rep.t_w = rec[i_w].t;

  rep.min_d_o = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < i_lim; ++i) {
    rep.min_d_o = std::min(rep.min_d_o, rec[i].d_o);
  }
  rep.min_d_e = std::numeric_limits<double>::infinity();
  rep.max_q_w_in_w = 0.0;
  for (std::size_t i = i_w; i < i_lim; ++i) {
    rep.min_d_e = std::min(rep.min_d_e, rec[i].d_e);
    rep.max_q_w_in_w = std::max(rep.max_q_w_in_w, rec[i].q_w.norm());
  }
  rep.in_w_held = rep.max_q_w_in_w <= eps;

  // d(d_o)/dt at the crossing sample; central difference when possible.
  const double dt = log.dt;
  if (i_lim + 1 < rec.size() && i_lim >= 1) {
    rep.dot_do = (rec[i_lim + 1].d_o - rec[i_lim - 1].d_o) / (2.0 * dt);
  } else if (i_lim >= 1) {
    rep.dot_do = (rec[i_lim].d_o - rec[i_lim - 1].d_o) / dt;
  } else {
    rep.dot_do = 0.0;
  }

  rep.assertions.push_back(make_assertion(
      "crossing entry time t_w before t_lim", rep.t_w, rep.t_lim, true));
  rep.assertions.push_back(make_assertion(
      "crossing max ||q_w|| on [t_w, t_lim)", rep.max_q_w_in_w,
      eps * (1.0 + 1e-12), true));
  rep.assertions.push_back(make_assertion(
      "crossing min d_o before t_lim", rep.min_d_o, 0.0, false));
  rep.assertions.push_back(make_assertion(
      "crossing speed d(d_o)/dt at t_lim", rep.dot_do, margins.max_dot_do,
      true));
  rep.assertions.push_back(make_assertion(
      "crossing min d_e on [t_w, t_lim)", rep.min_d_e, margins.edge_margin,
      false));
  rep.pass = all_pass(rep.assertions);
  return rep;
}

double lateral_centroid_root(const LandingPad& pad, const Vec3& dir,
                             double target, double d_t) {
  if (target <= 0.0) return 0.0;
  const Vec3 c = pad.center();
  const Vec3 eta = pad.normal.vec();
  const Mat3 pi = pad.normal.projector();
  const Vec3 u = (pi * dir).normalized();

  const auto lateral_q = [&](double x) {
    const Vec3 xi = c + x * u - d_t * eta;
    return (pi * pad_centroid(pad, xi)).norm();
  };

  // The lateral centroid grows from 0 toward its supremum along the ray;
  // find an upper bracket, expanding past any local flattening.
  double span = 0.0;
  for (const Vec3& m : pad.markers) span = std::max(span, (m - c).norm());
  double hi = std::max(span, 1e-3);
  double sup = lateral_q(hi);
  for (int i = 0; i < 40 && sup < target; ++i) {
    hi *= 2.0;
    sup = std::max(sup, lateral_q(hi));
  }
  if (sup < target) {
    throw NoRoot(fmt::format(
        "disturbance exceeds feature authority: target {:.4g} above "
        "sup ||pi q_t|| = {:.4g}",
        target, sup));
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lateral_q(mid) < target ? lo : hi) = mid;
    if (hi - lo < 1e-9) break;
  }
  return 0.5 * (lo + hi);
}

UltimateBound ultimate_bound(const LandingPad& pad, const VehicleParams& params,
                             const LandingGains& gains,
                             const Vec3& delta_accel) {
  UltimateBound b;
  const Mat3 pi = pad.normal.projector();
  const Vec3 lateral = pi * delta_accel;
  const double mag = lateral.norm();
  if (mag < 1e-15) return b;
  const Vec3 dir = lateral / mag;
  b.dxi_p = lateral_centroid_root(pad, dir, params.mass * mag / gains.kp12);
  b.dxi_d = lateral_centroid_root(pad, dir, params.mass * mag / gains.kd12);
  return b;
}

}  // namespace ibvs
