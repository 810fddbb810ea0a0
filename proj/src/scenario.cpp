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

#include "ibvs/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

#include "ibvs/errors.hpp"

namespace ibvs {
namespace {

using nlohmann::json;

const json* locate(const json& root, const std::string& key) {
  const json* cur = &root;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = key.find('.', pos);
    const std::string part =
        key.substr(pos, dot == std::string::npos ? std::string::npos
                                                 : dot - pos);
    if (!cur->is_object() || !cur->contains(part)) return nullptr;
    cur = &cur->at(part);
    if (dot == std::string::npos) return cur;
    pos = dot + 1;
  }
}

const json& require(const json& root, const std::string& key) {
  const json* p = locate(root, key);
  if (p == nullptr) {
    throw ParseError(fmt::format("missing required key `{}`", key));
  }
  return *p;
}

double as_number(const json& j, const std::string& key) {
  if (!j.is_number()) {
    throw ParseError(fmt::format("key `{}` must be a number", key));
  }
  return j.get<double>();
}

double num_or(const json& root, const std::string& key, double fallback) {
  const json* p = locate(root, key);
  return p == nullptr ? fallback : as_number(*p, key);
}

int int_or(const json& root, const std::string& key, int fallback) {
  const json* p = locate(root, key);
  if (p == nullptr) return fallback;
  if (!p->is_number_integer()) {
    throw ParseError(fmt::format("key `{}` must be an integer", key));
  }
  return p->get<int>();
}

bool bool_or(const json& root, const std::string& key, bool fallback) {
  const json* p = locate(root, key);
  if (p == nullptr) return fallback;
  if (!p->is_boolean()) {
    throw ParseError(fmt::format("key `{}` must be a boolean", key));
  }
  return p->get<bool>();
}

std::string str_or(const json& root, const std::string& key,
                   const std::string& fallback) {
  const json* p = locate(root, key);
  if (p == nullptr) return fallback;
  if (!p->is_string()) {
    throw ParseError(fmt::format("key `{}` must be a string", key));
  }
  return p->get<std::string>();
}

Vec3 as_vec3(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError(fmt::format("key `{}` must be an array of 3 numbers",
                                 key));
  }
  Vec3 v;
  for (int i = 0; i < 3; ++i) v[i] = as_number(j.at(i), key);
  return v;
}

Vec3 vec3_or(const json& root, const std::string& key, const Vec3& fallback) {
  const json* p = locate(root, key);
  return p == nullptr ? fallback : as_vec3(*p, key);
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

DisturbanceModel disturbance_from(const json& root) {
  DisturbanceModel d;
  const std::string kind = str_or(root, "disturbance.kind", "zero");
  if (kind == "zero") {
    d.kind = DisturbanceModel::Kind::kZero;
  } else if (kind == "constant") {
    d.kind = DisturbanceModel::Kind::kConstant;
  } else if (kind == "sinusoid") {
    d.kind = DisturbanceModel::Kind::kSinusoid;
  } else if (kind == "horizontal_constant") {
    d.kind = DisturbanceModel::Kind::kHorizontalConstant;
  } else {
    throw ParseError(fmt::format(
        "key `disturbance.kind` has unknown value `{}`", kind));
  }
  d.amplitude = vec3_or(root, "disturbance.amplitude", Vec3::Zero());
  d.frequency = num_or(root, "disturbance.frequency", 0.0);
  d.phase = num_or(root, "disturbance.phase", 0.0);
  d.horizontal_reference = UnitVec3(
      vec3_or(root, "disturbance.reference", Vec3::UnitZ()));
  return d;
}

const char* kind_name(DisturbanceModel::Kind k) {
  switch (k) {
    case DisturbanceModel::Kind::kZero: return "zero";
    case DisturbanceModel::Kind::kConstant: return "constant";
    case DisturbanceModel::Kind::kSinusoid: return "sinusoid";
    case DisturbanceModel::Kind::kHorizontalConstant:
      return "horizontal_constant";
  }
  return "zero";
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ScenarioInvalid(what);
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("scenario is not valid JSON: {}", e.what()));
  }

  Scenario s;
  s.name = str_or(root, "name", "unnamed");

  s.vehicle.mass = as_number(require(root, "vehicle.mass"), "vehicle.mass");
  s.vehicle.gravity = num_or(root, "vehicle.gravity", 9.81);
  const Vec3 inertia_diag =
      vec3_or(root, "vehicle.inertia", Vec3(0.01, 0.01, 0.02));
  s.vehicle.inertia = inertia_diag.asDiagonal();

  const json& markers = require(root, "scene.pad.markers");
  if (!markers.is_array() || markers.size() < 3) {
    throw ParseError(
        "key `scene.pad.markers` must be an array of at least 3 points");
  }
  s.scene.pad.markers.clear();
  for (std::size_t i = 0; i < markers.size(); ++i) {
    s.scene.pad.markers.push_back(
        as_vec3(markers.at(i), fmt::format("scene.pad.markers[{}]", i)));
  }
  s.scene.pad.normal =
      UnitVec3(as_vec3(require(root, "scene.pad.normal"), "scene.pad.normal"));

  if (locate(root, "scene.window") != nullptr) {
    WindowSpec w;
    w.center = as_vec3(require(root, "scene.window.center"),
                       "scene.window.center");
    w.normal = UnitVec3(as_vec3(require(root, "scene.window.normal"),
                                "scene.window.normal"));
    w.u = UnitVec3(as_vec3(require(root, "scene.window.u"), "scene.window.u"));
    w.width = as_number(require(root, "scene.window.width"),
                        "scene.window.width");
    w.height = as_number(require(root, "scene.window.height"),
                         "scene.window.height");
    s.scene.window = w;
  } else {
    s.scene.window.reset();
  }

  s.scene.downward.mount = Rot3();
  s.scene.downward.fov_half_angle =
      num_or(root, "scene.downward_fov_half_angle", 1.0471975511965976);
  s.scene.forward.mount = CameraModel::default_forward_mount();
  s.scene.forward.fov_half_angle =
      num_or(root, "scene.forward_fov_half_angle", 1.0471975511965976);

  s.initial.position = as_vec3(require(root, "initial.position"),
                               "initial.position");
  s.initial.velocity = vec3_or(root, "initial.velocity", Vec3::Zero());
  s.initial.yaw = num_or(root, "initial.yaw", 0.0);
  const std::string att = str_or(root, "initial.attitude", "level");
  if (att == "level") {
    s.initial.attitude = InitialAttitude::kLevel;
  } else if (att == "aligned") {
    s.initial.attitude = InitialAttitude::kAligned;
  } else {
    throw ParseError(fmt::format(
        "key `initial.attitude` must be `level` or `aligned`, got `{}`", att));
  }

  LandingGains& lg = s.control.landing;
  lg.kp12 = num_or(root, "gains.landing.kp12", lg.kp12);
  lg.kp3 = num_or(root, "gains.landing.kp3", lg.kp3);
  lg.kd12 = num_or(root, "gains.landing.kd12", lg.kd12);
  lg.kd3 = num_or(root, "gains.landing.kd3", lg.kd3);
  lg.phi_star = num_or(root, "gains.landing.phi_star", lg.phi_star);

  WindowGains& wg = s.control.window;
  wg.kp = num_or(root, "gains.window.kp", wg.kp);
  wg.kd = num_or(root, "gains.window.kd", wg.kd);
  wg.kphi = num_or(root, "gains.window.kphi", wg.kphi);
  wg.phi_star = num_or(root, "gains.window.phi_star", wg.phi_star);
  wg.epsilon = num_or(root, "gains.window.epsilon", wg.epsilon);
  wg.delta = num_or(root, "gains.window.delta", wg.delta);

  AttitudeGains& ag = s.control.attitude;
  ag.kR = num_or(root, "gains.attitude.kR", ag.kR);
  ag.kOmega = num_or(root, "gains.attitude.kOmega", ag.kOmega);

  MissionConfig& mc = s.control.mission;
  mc.lat_threshold = num_or(root, "gains.mission.lat_threshold",
                            mc.lat_threshold);
  mc.beta_touchdown = num_or(root, "gains.mission.beta_touchdown",
                             mc.beta_touchdown);
  mc.hold_time = num_or(root, "gains.mission.hold_time", mc.hold_time);
  mc.ramp_time = num_or(root, "gains.mission.ramp_time", mc.ramp_time);
  mc.grace_time = num_or(root, "gains.mission.grace_time", mc.grace_time);
  mc.corner_jump_threshold = num_or(
      root, "gains.mission.corner_jump_threshold", mc.corner_jump_threshold);
  mc.mode2_literal = bool_or(root, "gains.mission.mode2_literal",
                             mc.mode2_literal);

  s.disturbance = disturbance_from(root);

  s.noise.bearing_sigma = num_or(root, "noise.bearing_sigma", 0.0);
  s.noise.flow_relative_sigma = num_or(root, "noise.flow_relative_sigma", 0.0);
  s.noise.seed = static_cast<std::uint64_t>(
      int_or(root, "noise.seed", 1));

  s.sim.dt = as_number(require(root, "sim.dt"), "sim.dt");
  s.sim.duration = as_number(require(root, "sim.duration"), "sim.duration");
  s.sim.thrust_clamp = num_or(root, "sim.thrust_clamp", 0.0);
  s.sim.control_decimation = int_or(root, "sim.control_decimation", 1);
  s.sim.renorm_interval = int_or(root, "sim.renorm_interval", 1000);
  return s;
}

std::string scenario_to_json_text(const Scenario& s) {
  json root;
  root["name"] = s.name;
  root["vehicle"] = {
      {"mass", s.vehicle.mass},
      {"gravity", s.vehicle.gravity},
      {"inertia", vec3_json(s.vehicle.inertia.diagonal())},
  };

  json markers = json::array();
  for (const Vec3& m : s.scene.pad.markers) markers.push_back(vec3_json(m));
  root["scene"]["pad"] = {
      {"markers", markers},
      {"normal", vec3_json(s.scene.pad.normal.vec())},
  };
  if (s.scene.window.has_value()) {
    const WindowSpec& w = *s.scene.window;
    root["scene"]["window"] = {
        {"center", vec3_json(w.center)},
        {"normal", vec3_json(w.normal.vec())},
        {"u", vec3_json(w.u)},
        {"width", w.width},
        {"height", w.height},
    };
  }
  root["scene"]["downward_fov_half_angle"] = s.scene.downward.fov_half_angle;
  root["scene"]["forward_fov_half_angle"] = s.scene.forward.fov_half_angle;

  root["initial"] = {
      {"position", vec3_json(s.initial.position)},
      {"velocity", vec3_json(s.initial.velocity)},
      {"yaw", s.initial.yaw},
      {"attitude",
       s.initial.attitude == InitialAttitude::kLevel ? "level" : "aligned"},
  };

  root["gains"]["landing"] = {
      {"kp12", s.control.landing.kp12}, {"kp3", s.control.landing.kp3},
      {"kd12", s.control.landing.kd12}, {"kd3", s.control.landing.kd3},
      {"phi_star", s.control.landing.phi_star},
  };
  root["gains"]["window"] = {
      {"kp", s.control.window.kp},     {"kd", s.control.window.kd},
      {"kphi", s.control.window.kphi}, {"phi_star", s.control.window.phi_star},
      {"epsilon", s.control.window.epsilon},
      {"delta", s.control.window.delta},
  };
  root["gains"]["attitude"] = {
      {"kR", s.control.attitude.kR},
      {"kOmega", s.control.attitude.kOmega},
  };
  root["gains"]["mission"] = {
      {"lat_threshold", s.control.mission.lat_threshold},
      {"beta_touchdown", s.control.mission.beta_touchdown},
      {"hold_time", s.control.mission.hold_time},
      {"ramp_time", s.control.mission.ramp_time},
      {"grace_time", s.control.mission.grace_time},
      {"corner_jump_threshold", s.control.mission.corner_jump_threshold},
      {"mode2_literal", s.control.mission.mode2_literal},
  };

  root["disturbance"] = {
      {"kind", kind_name(s.disturbance.kind)},
      {"amplitude", vec3_json(s.disturbance.amplitude)},
      {"frequency", s.disturbance.frequency},
      {"phase", s.disturbance.phase},
      {"reference", vec3_json(s.disturbance.horizontal_reference.vec())},
  };
  root["noise"] = {
      {"bearing_sigma", s.noise.bearing_sigma},
      {"flow_relative_sigma", s.noise.flow_relative_sigma},
      {"seed", s.noise.seed},
  };
  root["sim"] = {
      {"dt", s.sim.dt},
      {"duration", s.sim.duration},
      {"thrust_clamp", s.sim.thrust_clamp},
      {"control_decimation", s.sim.control_decimation},
      {"renorm_interval", s.sim.renorm_interval},
  };
  return root.dump(2) + "\n";
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open scenario file `{}`",
                                        path));
  std::ostringstream buf;
  buf << in.rdbuf();
  Scenario s = scenario_from_json_text(buf.str());
  validate_scenario(s);
  return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write scenario file `{}`", path));
  out << scenario_to_json_text(s);
}

double level_set_max_radius(const WindowSpec& window, double eps,
                            int n_directions) {
  const Vec3 eta = window.normal.vec();
  const auto q_norm = [&window](const Vec3& xi) {
    return window_centroid(window, xi).norm();
  };

  double worst = 0.0;
  int used = 0;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n_directions; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n_directions;
    const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * i;
    Vec3 dir(rxy * std::cos(th), rxy * std::sin(th), z);
    const double along = eta.dot(dir);
    if (std::abs(along) < 1e-6) continue;  // grazing the wall plane
    if (along > 0.0) dir = -dir;           // keep the front side, d_o > 0

    double hi = 0.05;
    while (q_norm(window.center + hi * dir) < eps && hi < 64.0) hi *= 2.0;
    if (q_norm(window.center + hi * dir) < eps) {
      throw ScenarioInvalid(
          "window level set is unbounded along a sampled direction");
    }
    double lo = 0.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      (q_norm(window.center + mid * dir) < eps ? lo : hi) = mid;
    }
    worst = std::max(worst, hi);
    ++used;
  }
  if (used == 0) {
    throw ScenarioInvalid("level-set sampling produced no usable directions");
  }
  return worst;
}

void validate_scenario(const Scenario& s) {
  check(s.vehicle.mass > 0.0, "vehicle.mass must be positive");
  check(s.vehicle.gravity > 0.0, "vehicle.gravity must be positive");
  for (int i = 0; i < 3; ++i) {
    check(s.vehicle.inertia(i, i) > 0.0,
          "vehicle.inertia diagonal must be positive");
  }

  check(s.sim.dt > 0.0 && s.sim.dt <= 0.02,
        "sim.dt must lie in (0, 0.02]");
  check(s.sim.duration >= 0.0, "sim.duration must be non-negative");
  check(s.sim.thrust_clamp >= 0.0, "sim.thrust_clamp must be non-negative");
  check(s.sim.control_decimation >= 1,
        "sim.control_decimation must be at least 1");
  check(s.sim.renorm_interval >= 1, "sim.renorm_interval must be at least 1");

  check(s.noise.bearing_sigma >= 0.0,
        "noise.bearing_sigma must be non-negative");
  check(s.noise.flow_relative_sigma >= 0.0,
        "noise.flow_relative_sigma must be non-negative");

  const LandingGains& lg = s.control.landing;
  check(lg.kp12 > 0.0 && lg.kp3 > 0.0 && lg.kd12 > 0.0 && lg.kd3 > 0.0,
        "gains.landing entries must be positive");
  check(lg.phi_star >= 0.0, "gains.landing.phi_star must be non-negative");

  const WindowGains& wg = s.control.window;
  check(wg.kp > 0.0 && wg.kd > 0.0 && wg.kphi > 0.0,
        "gains.window entries must be positive");
  check(wg.epsilon > 0.0 && wg.epsilon < 1.0,
        "gains.window.epsilon must lie in (0, 1)");
  check(wg.delta > 0.0 && wg.delta < wg.epsilon,
        "gains.window.delta must lie in (0, epsilon)");

  const MissionConfig& mc = s.control.mission;
  check(mc.lat_threshold > 0.0, "mission.lat_threshold must be positive");
  check(mc.beta_touchdown > 0.0, "mission.beta_touchdown must be positive");
  check(mc.hold_time >= 0.0, "mission.hold_time must be non-negative");
  check(mc.ramp_time > 0.0, "mission.ramp_time must be positive");
  check(mc.grace_time >= 0.0, "mission.grace_time must be non-negative");
  check(mc.corner_jump_threshold > 0.0,
        "mission.corner_jump_threshold must be positive");

  check(s.control.attitude.kR > 0.0 && s.control.attitude.kOmega > 0.0,
        "gains.attitude entries must be positive");

  s.scene.pad.validate();
  if (s.scene.window.has_value()) s.scene.window->validate();
  s.disturbance.validate();

  const Distances d0 = distances(s.scene, s.initial.position);
  check(d0.d_t > 0.0, "initial position must satisfy d_t(0) > 0");
  if (s.scene.window.has_value()) {
    check(d0.d_o > 0.0, "initial position must satisfy d_o(0) > 0");
    const WindowSpec& w = *s.scene.window;
    const double r_w = std::min(w.width, w.height);
    const double limit = 0.5 * r_w - s.control.window.epsilon;
    check(limit > 0.0,
          "gains.window.epsilon too large for the window: r_w/2 - eps <= 0");
    const double worst = level_set_max_radius(w, s.control.window.epsilon);
    check(worst < limit,
          fmt::format("safety region spills past the window edge margin: "
                      "max ||xi_w|| on the eps level set is {:.4f} m, "
                      "needs < r_w/2 - eps = {:.4f} m",
                      worst, limit));
  }
}

}  // namespace ibvs
