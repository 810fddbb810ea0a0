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

// End-to-end acceptance harness. Each criterion prints exactly one
// [PASS]/[FAIL] line; the process exits nonzero when any criterion fails.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

#include "ibvs/analysis.hpp"
#include "ibvs/control.hpp"
#include "ibvs/perception.hpp"
#include "ibvs/rng.hpp"
#include "ibvs/scenario.hpp"
#include "ibvs/simulator.hpp"

namespace {

using ibvs::Vec3;

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what);
}

void require(bool cond, const std::string& what) {
  if (!cond) fail(what);
}

std::string scenario_path(const char* name) {
  return std::string(IBVS_SCENARIO_DIR) + "/" + name;
}

std::string failed_names(const std::vector<ibvs::Assertion>& assertions) {
  std::string out;
  for (const auto& a : assertions) {
    if (a.pass) continue;
    if (!out.empty()) out += "; ";
    out += fmt::format("{} value={:.6g}", a.name, a.value);
  }
  return out.empty() ? "unknown assertion" : out;
}

// The full criterion-1 verdict on one closed-loop run: completes through
// mode 4 inside the horizon, crossing assertions, landing assertions.
std::string mission_verdict(const ibvs::TrajectoryLog& log,
                            const ibvs::Scenario& sc, double horizon) {
  if (log.events.abort.has_value())
    return "aborted: " + log.events.abort_reason;
  if (!log.events.t4.has_value()) return "mode 4 never reached";
  if (log.records.back().t > horizon)
    return fmt::format("ended at {:.2f} s > {:.0f} s", log.records.back().t,
                       horizon);
  ibvs::CrossingMargins margins;
  margins.edge_margin = 0.05;
  margins.max_dot_do = -0.05;
  try {
    const ibvs::CrossingReport cross =
        ibvs::check_crossing(log, sc.control.window.epsilon, margins);
    if (!cross.pass) return "crossing: " + failed_names(cross.assertions);
  } catch (const std::exception& e) {
    return std::string("crossing: ") + e.what();
  }
  try {
    const ibvs::LandingReport land = ibvs::check_landing(log, sc.scene.pad);
    if (!land.pass) return "landing: " + failed_names(land.assertions);
  } catch (const std::exception& e) {
    return std::string("landing: ") + e.what();
  }
  return "";
}

std::string criterion_1() {
  const ibvs::Scenario sc = ibvs::load_scenario(scenario_path("nominal.json"));
  const auto t0 = std::chrono::steady_clock::now();
  const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  const std::string verdict = mission_verdict(log, sc, 30.0);
  require(verdict.empty(), verdict);
  require(wall < 10.0, fmt::format("wall clock {:.2f} s >= 10 s", wall));
  const ibvs::LandingReport land = ibvs::check_landing(log, sc.scene.pad);
  return fmt::format("touchdown d_t={:.4f} m |v|={:.4f} m/s wall={:.2f} s",
                     land.terminal_d_t, land.terminal_speed, wall);
}

std::string criterion_2() {
  std::ifstream in(scenario_path("nominal_sweep.json"));
  require(in.good(), "cannot open nominal_sweep.json");
  const nlohmann::json spec = nlohmann::json::parse(in);
  const ibvs::Scenario base = ibvs::load_scenario(
      scenario_path(spec.at("base").get<std::string>().c_str()));
  const auto& positions = spec.at("positions");
  require(positions.size() >= 5, "sweep spec has fewer than 5 positions");
  int passed = 0;
  std::string first_fail;
  for (const auto& p : positions) {
    ibvs::Scenario sc = base;
    sc.initial.position = Vec3(p.at(0).get<double>(), p.at(1).get<double>(),
                               p.at(2).get<double>());
    ibvs::validate_scenario(sc);
    const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
    const std::string verdict = mission_verdict(log, sc, 30.0);
    if (verdict.empty()) {
      ++passed;
    } else if (first_fail.empty()) {
      first_fail = fmt::format("start ({:.2f},{:.2f},{:.2f}): {}",
                               sc.initial.position.x(),
                               sc.initial.position.y(),
                               sc.initial.position.z(), verdict);
    }
  }
  require(passed == static_cast<int>(positions.size()), first_fail);
  return fmt::format("{}/{} starts crossed and landed", passed,
                     positions.size());
}

std::string criterion_3() {
  ibvs::Scenario base =
      ibvs::load_scenario(scenario_path("landing_free.json"));
  base.sim.duration = 30.0;
  ibvs::Rng rng(42);
  int passed = 0;
  std::string first_fail;
  for (int k = 0; k < 10; ++k) {
    ibvs::Scenario sc = base;
    const double lateral_x = rng.uniform(-0.3, 0.3);
    const double lateral_y = rng.uniform(-0.3, 0.3);
    const double d0 = rng.uniform(0.5, 3.0);
    sc.initial.position =
        sc.scene.pad.center() + Vec3(lateral_x, lateral_y, -d0);
    ibvs::validate_scenario(sc);
    const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
    std::string verdict;
    if (log.events.abort.has_value()) {
      verdict = "aborted: " + log.events.abort_reason;
    } else {
      ibvs::LandingTolerances tol;
      tol.dl2_step = 1e-6;
      try {
        const ibvs::LandingReport rep =
            ibvs::check_landing(log, sc.scene.pad, tol);
        if (!rep.pass) verdict = failed_names(rep.assertions);
      } catch (const std::exception& e) {
        verdict = e.what();
      }
    }
    if (verdict.empty()) {
      ++passed;
    } else if (first_fail.empty()) {
      first_fail = fmt::format("run {} (d0={:.2f}): {}", k, d0, verdict);
    }
  }
  require(passed == 10, first_fail);
  return "10/10 randomized landings kept d_t>0 and dL2<=1e-6";
}

std::string criterion_4() {
  const ibvs::Scenario sc =
      ibvs::load_scenario(scenario_path("disturbed_horizontal.json"));
  const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
  require(!log.events.abort.has_value(),
          "aborted: " + log.events.abort_reason);
  const ibvs::LogRecord& last = log.records.back();
  require(last.t <= 40.0, fmt::format("ended at {:.2f} s", last.t));
  require(last.d_t < 0.02, fmt::format("terminal d_t={:.4f} m", last.d_t));
  require(last.v.norm() < 0.05,
          fmt::format("terminal |v|={:.4f} m/s", last.v.norm()));
  const Vec3 delta_accel = sc.disturbance.amplitude / sc.vehicle.mass;
  const ibvs::UltimateBound b = ibvs::ultimate_bound(
      sc.scene.pad, sc.vehicle, sc.control.landing, delta_accel);
  const double bound = 1.10 * std::max(b.dxi_p, b.dxi_d);
  const ibvs::Mat3 pi = sc.scene.pad.normal.projector();
  const double lateral = (pi * (last.xi - sc.scene.pad.center())).norm();
  require(lateral <= bound,
          fmt::format("terminal lateral {:.4f} m > bound {:.4f} m", lateral,
                      bound));
  return fmt::format("terminal lateral {:.4f} m within bound {:.4f} m",
                     lateral, bound);
}

std::string criterion_5() {
  const ibvs::Scenario sc =
      ibvs::load_scenario(scenario_path("disturbed_vertical.json"));
  const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
  require(!log.events.abort.has_value(),
          "aborted: " + log.events.abort_reason);
  double min_d_t = std::numeric_limits<double>::infinity();
  double sup_xi = 0.0;
  for (const auto& r : log.records) {
    min_d_t = std::min(min_d_t, r.d_t);
    sup_xi = std::max(sup_xi, r.xi.norm());
  }
  const ibvs::LogRecord& last = log.records.back();
  require(min_d_t > 0.0, fmt::format("min d_t={:.4g} m", min_d_t));
  require(last.t <= 40.0, fmt::format("ended at {:.2f} s", last.t));
  require(last.d_t < 0.02, fmt::format("terminal d_t={:.4f} m", last.d_t));
  const double cap = 2.0 * sc.initial.position.norm();
  require(sup_xi < cap,
          fmt::format("sup ||xi||={:.3f} m >= {:.3f} m", sup_xi, cap));
  return fmt::format("min d_t={:.4f} m, sup ||xi||={:.3f} m < {:.3f} m",
                     min_d_t, sup_xi, cap);
}

std::string criterion_6() {
  const ibvs::Scenario base =
      ibvs::load_scenario(scenario_path("crossing_base.json"));
  require(base.scene.window.has_value(), "crossing scenario has no window");
  const ibvs::WindowSpec& w = *base.scene.window;
  ibvs::Rng rng(6);
  int passed = 0;
  std::string first_fail;
  for (int k = 0; k < 10; ++k) {
    ibvs::Scenario sc = base;
    const double d_o0 = rng.uniform(1.0, 3.0);
    const double lateral = rng.uniform(-0.8, 0.8);
    sc.initial.position =
        w.center - d_o0 * w.normal.vec() + lateral * w.u.vec();
    ibvs::validate_scenario(sc);
    const ibvs::TrajectoryLog log = ibvs::run_scenario(sc);
    std::string verdict;
    try {
      const ibvs::CrossingReport rep =
          ibvs::check_crossing(log, sc.control.window.epsilon, {});
      if (!rep.pass) verdict = failed_names(rep.assertions);
    } catch (const std::exception& e) {
      verdict = e.what();
    }
    if (verdict.empty()) {
      ++passed;
    } else if (first_fail.empty()) {
      first_fail = fmt::format("run {} (d_o0={:.2f}, lat={:.2f}): {}", k,
                               d_o0, lateral, verdict);
    }
  }
  require(passed == 10, first_fail);
  return "10/10 randomized approaches entered the safety region and crossed";
}

std::string criterion_7() {
  const ibvs::Scenario sc = ibvs::load_scenario(scenario_path("nominal.json"));
  const ibvs::GainReport ok = ibvs::validate_gains(
      sc.control.landing, sc.control.window, 1.0, 0.0, 0.0);
  require(ok.all_pass(), "r_w=1.0 did not pass: unexpected failure");
  double margin = std::numeric_limits<double>::quiet_NaN();
  for (const auto& c : ok.conditions) {
    if (c.name.find("k_d^2/k_p") != std::string::npos) margin = c.margin();
  }
  require(std::abs(margin - 0.14) < 1e-9,
          fmt::format("damping margin {:.4f} != 0.14", margin));
  const ibvs::GainReport bad = ibvs::validate_gains(
      sc.control.landing, sc.control.window, 1.4, 0.0, 0.0);
  require(!bad.all_pass(), "r_w=1.4 unexpectedly passed");
  bool cited = false;
  for (const auto& c : bad.conditions) {
    if (!c.pass && c.name.find("k_d^2/k_p > r_w/2") != std::string::npos)
      cited = true;
  }
  require(cited, "failure does not cite the damping inequality");
  return "r_w=1.0 margin 0.14; r_w=1.4 fails citing k_d^2/k_p > r_w/2";
}

std::string criterion_8() {
  const double cap = 30.0 * std::numbers::pi / 180.0;
  const ibvs::FlowOracle oracle(cap);
  ibvs::Rng rng(7);
  const int samples = 100000;
  int within = 0;
  int improved = 0;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Vec3 v(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                 rng.uniform(-1.0, 1.0));
    const double d = rng.uniform(0.5, 3.0);
    const ibvs::UnitVec3 eta(Vec3::UnitZ());
    const Vec3 truth = v / d;
    const Vec3 est = oracle.estimate(v, d, eta, samples, 7 + 1000 + k);
    const Vec3 est4 = oracle.estimate(v, d, eta, 4 * samples, 7 + 2000 + k);
    const double err = (est - truth).norm() / truth.norm();
    const double err4 = (est4 - truth).norm() / truth.norm();
    worst = std::max(worst, err);
    if (err <= 0.02) ++within;
    if (err4 < err) ++improved;
  }
  require(within == 10,
          fmt::format("{}/10 within 2% (worst {:.4f})", within, worst));
  require(improved >= 8, fmt::format("4x samples improved only {}/10", improved));
  return fmt::format("10/10 within 2% (worst {:.4f}); 4x improved {}/10",
                     worst, improved);
}

std::string criterion_9() {
  const ibvs::Scenario sc = ibvs::load_scenario(scenario_path("nominal.json"));
  require(sc.scene.window.has_value(), "nominal scenario has no window");
  const ibvs::WindowSpec& w = *sc.scene.window;
  const double eps = sc.control.window.epsilon;
  const double delta = sc.control.window.delta;
  const std::array<Vec3, 4> corners = w.corners();
  ibvs::Rng rng(9);
  double max_eta_err = 0.0;
  double max_qbar_err = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vec3 xi = w.center - rng.uniform(0.5, 3.0) * w.normal.vec() +
                    rng.uniform(-1.0, 1.0) * w.u.vec() +
                    rng.uniform(-1.0, 1.0) * w.rho();
    std::array<Vec3, 4> bearings;
    for (int i = 0; i < 4; ++i)
      bearings[i] = ibvs::normalize(corners[i] - xi);
    const std::array<Vec3, 4> h = ibvs::edge_plane_normals(bearings);
    const Vec3 q_w = ibvs::window_centroid(w, xi);
    const ibvs::WindowFrame frame = ibvs::window_frame_from_lines(h, q_w);
    max_eta_err = std::max(max_eta_err,
                           (frame.eta.vec() - w.normal.vec()).norm());
    const ibvs::ClosestEdge edge =
        ibvs::closest_edge_direction(h, bearings, frame);
    const double alpha = ibvs::weight_alpha(q_w.norm(), eps, delta);
    const Vec3 qbar =
        ibvs::weighted_window_centroid(bearings, frame.eta, edge.direction,
                                       alpha);
    const ibvs::Distances dist = ibvs::distances(sc.scene, xi);
    const Vec3 truth =
        (alpha / dist.d_o + (1.0 - alpha) / dist.d_e) * (xi - w.center);
    max_qbar_err = std::max(max_qbar_err, (qbar - truth).norm());
  }
  require(max_eta_err < 1e-9,
          fmt::format("max eta error {:.3e}", max_eta_err));
  require(max_qbar_err < 1e-9,
          fmt::format("max centroid error {:.3e}", max_qbar_err));
  return fmt::format("100 vantages: eta err {:.2e}, centroid err {:.2e}",
                     max_eta_err, max_qbar_err);
}

// Global position error of the free-flight integrator against the closed
// form under a sinusoidal force, for one step size.
double ballistic_error(double dt) {
  ibvs::VehicleParams params;
  ibvs::DisturbanceModel dist;
  dist.kind = ibvs::DisturbanceModel::Kind::kSinusoid;
  dist.amplitude = Vec3(0.5, -0.3, 0.2);
  dist.frequency = 1.5;
  dist.phase = 0.4;
  ibvs::Wrench wrench;  // zero thrust, zero torque
  ibvs::VehicleState state;
  state.xi = Vec3(0.1, -0.2, -1.0);
  state.v = Vec3(0.3, 0.4, -0.1);
  const Vec3 x0 = state.xi;
  const Vec3 v0 = state.v;
  const double T = 1.0;
  const int n = static_cast<int>(std::round(T / dt));
  for (int i = 0; i < n; ++i)
    state = ibvs::rk4_step(state, wrench, dist, params, i * dt, dt);
  const double om = 2.0 * std::numbers::pi * dist.frequency;
  const Vec3 a = dist.amplitude / params.mass;
  const Vec3 exact = x0 + v0 * T +
                     0.5 * params.gravity * T * T * Vec3::UnitZ() +
                     a * (std::cos(dist.phase) * T / om +
                          (std::sin(dist.phase) - std::sin(om * T + dist.phase)) /
                              (om * om));
  return (state.xi - exact).norm();
}

std::string criterion_10() {
  const double e_coarse = ballistic_error(1e-2);
  const double e_fine = ballistic_error(5e-3);
  const double ratio = e_coarse / e_fine;
  require(ratio > 12.0 && ratio < 20.0,
          fmt::format("error ratio {:.2f} outside [12, 20]", ratio));

  ibvs::VehicleParams params;
  ibvs::DisturbanceModel none;
  ibvs::Wrench wrench;
  ibvs::VehicleState state;
  state.omega = Vec3(0.8, -0.5, 1.2);
  const double dt = 1e-3;
  for (int i = 0; i < 1000000; ++i)
    state = ibvs::rk4_step(state, wrench, none, params, i * dt, dt);
  const double drift = state.R.orthonormality_error();
  require(drift < 1e-9,
          fmt::format("orthonormality drift {:.3e} over 1e6 steps", drift));
  return fmt::format("error ratio {:.2f}; drift {:.2e} over 1e6 steps", ratio,
                     drift);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "nominal window crossing and pad touchdown", criterion_1},
      {2, "multi-start sweep crosses and lands from all offsets", criterion_2},
      {3, "randomized free-space landings descend with bounded dL2",
       criterion_3},
      {4, "horizontal disturbance lands inside the predicted lateral bound",
       criterion_4},
      {5, "vertical disturbance keeps height positive and states bounded",
       criterion_5},
      {6, "randomized approaches enter the safety region before crossing",
       criterion_6},
      {7, "gain validator separates feasible and infeasible window radii",
       criterion_7},
      {8, "sampled flow estimate recovers v/d within tolerance", criterion_8},
      {9, "window frame and weighted centroid recovered from bearings",
       criterion_9},
      {10, "integrator shows fourth-order decay and orthonormal rotations",
       criterion_10},
  };
  bool ok = true;
  for (const auto& c : criteria) {
    std::string detail;
    bool pass = true;
    try {
      detail = c.body();
    } catch (const std::exception& e) {
      pass = false;
      detail = e.what();
      ok = false;
    }
    fmt::print("[{}] criterion {}: {}{}{}{}\n", pass ? "PASS" : "FAIL", c.id,
               c.label, detail.empty() ? "" : " (", detail,
               detail.empty() ? "" : ")");
  }
  return ok ? 0 : 1;
}
