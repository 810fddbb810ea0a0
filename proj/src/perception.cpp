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

#include "ibvs/perception.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

namespace {

constexpr double kPlaneRatioFloor = 1e-9;

// Signed value pushed away from zero; keeps logging fallbacks finite when
// the vehicle sits exactly on the window plane.
double clamp_away_from_zero(double x, double floor) {
  if (std::abs(x) >= floor) return x;
  return x >= 0.0 ? floor : -floor;
}

Vec3 tilt_bearing(const Vec3& bearing, double sigma, Rng& rng) {
  const double angle = sigma * rng.normal();
  // Random direction for the tilt axis; retry on (measure-zero) degeneracy.
  Vec3 axis;
  for (;;) {
    const Vec3 r(rng.normal(), rng.normal(), rng.normal());
    const Vec3 c = bearing.cross(r);
    if (c.norm() > kNormFloor) {
      axis = c.normalized();
      break;
    }
  }
  return Rot3::exp(axis * angle) * bearing;
}

// Closest point construction against the 4 infinite edge lines; used for
// the ground-truth fallback once the window has left the field of view.
ClosestEdge closest_edge_geometric(const WindowSpec& window, const Vec3& xi) {
  const auto corners = window.corners();
  ClosestEdge best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Vec3 a = corners[i];
    const Vec3 dir = (corners[(i + 1) % 4] - a).normalized();
    const Vec3 rel = xi - a;
    const Vec3 foot = a + rel.dot(dir) * dir;
    const Vec3 to_edge = foot - xi;
    const double dist = to_edge.norm();
    if (dist < best_dist - kNormFloor) {
      best_dist = dist;
      best.index = i;
      best.direction = to_edge / dist;
    }
  }
  return best;
}

}  // namespace

Vec3 LandingPad::center() const {
  Vec3 c = Vec3::Zero();
  for (const Vec3& m : markers) c += m;
  return c / static_cast<double>(markers.size());
}

void LandingPad::validate() const {
  if (markers.size() < 3) {
    throw ScenarioInvalid(
        fmt::format("pad needs at least 3 markers, got {}", markers.size()));
  }
  const Vec3 c = center();
  Eigen::MatrixXd rel(markers.size(), 3);
  for (size_t i = 0; i < markers.size(); ++i) {
    const double off = normal.dot(markers[i] - c);
    if (std::abs(off) > 1e-9) {
      throw ScenarioInvalid(fmt::format(
          "pad marker {} lies {:.3e} m off the pad plane", i, off));
    }
    rel.row(i) = (markers[i] - c).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rel);
  if (svd.singularValues()(1) < 1e-9) {
    throw ScenarioInvalid("pad markers are collinear");
  }
}

std::array<Vec3, 4> WindowSpec::corners() const {
  const Vec3 r = rho();
  const Vec3 c0 = center - 0.5 * width * u.vec() - 0.5 * height * r;
  return {c0, c0 + height * r, c0 + height * r + width * u.vec(),
          c0 + width * u.vec()};
}

void WindowSpec::validate() const {
  if (width <= 0.0 || height <= 0.0) {
    throw ScenarioInvalid(
        fmt::format("window extents must be positive, got {} x {}", width,
                    height));
  }
  if (std::abs(u.dot(normal)) > 1e-9) {
    throw ScenarioInvalid("window u axis is not orthogonal to its normal");
  }
}

Vec3 CameraModel::to_camera(const Rot3& R_body,
                            const Vec3& bearing_inertial) const {
  return mount.transposed() * (R_body.transposed() * bearing_inertial);
}

bool CameraModel::in_fov(const Rot3& R_body,
                         const Vec3& bearing_inertial) const {
  return to_camera(R_body, bearing_inertial).z() >= std::cos(fov_half_angle);
}

Rot3 CameraModel::default_forward_mount() {
  return Rot3::rot_z(-std::numbers::pi / 4.0) *
         Rot3::rot_x(std::numbers::pi / 2.0);
}

std::vector<Vec3> spherical_project(const std::vector<Vec3>& points,
                                    const Vec3& xi) {
  std::vector<Vec3> bearings;
  bearings.reserve(points.size());
  for (const Vec3& s : points) {
    bearings.push_back(normalize(s - xi, kDistanceFloor));
  }
  return bearings;
}

Vec3 centroid_from_bearings(const std::vector<Vec3>& bearings) {
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : bearings) sum += p;
  return -sum / static_cast<double>(bearings.size());
}

Vec3 pad_centroid(const LandingPad& pad, const Vec3& xi) {
  return centroid_from_bearings(spherical_project(pad.markers, xi));
}

Vec3 window_centroid(const WindowSpec& window, const Vec3& xi) {
  const auto c = window.corners();
  return centroid_from_bearings(spherical_project({c.begin(), c.end()}, xi));
}

std::array<Vec3, 4> edge_plane_normals(const std::array<Vec3, 4>& bearings) {
  std::array<Vec3, 4> h;
  for (int i = 0; i < 4; ++i) {
    h[i] = normalize(bearings[i].cross(bearings[(i + 1) % 4]), kNormFloor);
  }
  return h;
}

WindowFrame window_frame_from_lines(const std::array<Vec3, 4>& h,
                                    const Vec3& q_ref) {
  const Vec3 rho_raw = h[0].cross(h[2]);
  const Vec3 u_raw = h[1].cross(h[3]);
  if (rho_raw.norm() <= kPlaneRatioFloor || u_raw.norm() <= kPlaneRatioFloor) {
    throw ParallelLines(
        "opposite edge planes are parallel; observer lies in the window "
        "plane");
  }
  WindowFrame frame;
  frame.rho = rho_raw.normalized();
  Vec3 u = u_raw.normalized();
  Vec3 eta = u.cross(frame.rho).normalized();
  const double side = eta.dot(q_ref);
  if (side == 0.0) {
    throw WindowPlaneSingularity(
        "centroid reference gives no side information for the eta sign");
  }
  if (side > 0.0) {
    // Flip u as well so eta stays parallel to u x rho.
    eta = -eta;
    u = -u;
  }
  frame.u = u;
  frame.eta = UnitVec3(eta);
  return frame;
}

ClosestEdge closest_edge_direction(const std::array<Vec3, 4>& h,
                                   const std::array<Vec3, 4>& bearings,
                                   const WindowFrame& frame) {
  ClosestEdge best;
  double best_score = -1.0;
  for (int i = 0; i < 4; ++i) {
    const Vec3 axis = (i % 2 == 0) ? frame.rho : frame.u;
    Vec3 l = normalize(h[i].cross(axis), kNormFloor);
    // The closest point on an edge line is orthogonal to the line, so the
    // direction toward it has positive dot with both corner bearings.
    if (l.dot(bearings[i] + bearings[(i + 1) % 4]) < 0.0) l = -l;
    const double score = std::abs(frame.eta.dot(l));
    if (score > best_score) {  // strict: ties keep the lowest index
      best_score = score;
      best.index = i;
      best.direction = l;
    }
  }
  return best;
}

double weight_alpha(double q_w_norm, double eps, double delta) {
  if (q_w_norm <= eps) return 0.0;
  if (q_w_norm >= eps + delta) return 1.0;
  return (q_w_norm - eps) / delta;
}

Vec3 weighted_window_centroid(const std::array<Vec3, 4>& bearings,
                              const UnitVec3& eta, const Vec3& l_e,
                              double alpha) {
  const double gain = alpha + (1.0 - alpha) * eta.dot(l_e);
  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : bearings) {
    const double along = eta.dot(p);
    if (std::abs(along) < kPlaneRatioFloor) {
      throw WindowPlaneSingularity(fmt::format(
          "corner bearing lies in the window plane (eta'p = {:.3e})", along));
    }
    sum += p * (gain / along);
  }
  return -0.25 * sum;
}

Vec3 translational_flow(const Vec3& v, double d, double floor) {
  if (d <= floor) {
    throw DegenerateDistance(
        fmt::format("flow undefined at distance {:.3e} (floor {:.3e})", d,
                    floor));
  }
  return v / d;
}

Vec3 window_flow(const Vec3& v, double d_o, double d_e, double alpha,
                 double floor) {
  Vec3 flow = Vec3::Zero();
  if (alpha > 0.0) flow += alpha * translational_flow(v, d_o, floor);
  if (alpha < 1.0) flow += (1.0 - alpha) * translational_flow(v, d_e, floor);
  return flow;
}

Distances distances(const SceneGeometry& scene, const Vec3& xi) {
  Distances d;
  d.d_t = -scene.pad.normal.dot(xi - scene.pad.center());
  if (scene.window) {
    const WindowSpec& w = *scene.window;
    d.d_o = -w.normal.dot(xi - w.center);
    const auto corners = w.corners();
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
      const Vec3 a = corners[i];
      const Vec3 dir = (corners[(i + 1) % 4] - a).normalized();
      const Vec3 rel = xi - a;
      min_dist = std::min(min_dist, (rel - rel.dot(dir) * dir).norm());
    }
    d.d_e = min_dist;
  }
  return d;
}

FeatureSnapshot snapshot(const VehicleState& state, const SceneGeometry& scene,
                         const FeatureNoise& noise, double eps, double delta,
                         Rng& rng, double t) {
  FeatureSnapshot snap;
  snap.t = t;
  const Distances dist = distances(scene, state.xi);
  snap.d_t = dist.d_t;
  snap.d_o = dist.d_o;
  snap.d_e = dist.d_e;

  const double flow_factor =
      noise.flow_relative_sigma > 0.0
          ? 1.0 + noise.flow_relative_sigma * rng.normal()
          : 1.0;

  // Landing pad.
  std::vector<Vec3> pad_bearings =
      spherical_project(scene.pad.markers, state.xi);
  if (noise.bearing_sigma > 0.0) {
    for (Vec3& p : pad_bearings) {
      p = tilt_bearing(p, noise.bearing_sigma, rng);
    }
  }
  bool pad_in_fov = true;
  for (const Vec3& p : pad_bearings) {
    pad_in_fov = pad_in_fov && scene.downward.in_fov(state.R, p);
  }
  snap.pad_visible = pad_in_fov && snap.d_t > 0.0 &&
                     (!scene.window || snap.d_o <= 0.0);
  snap.q_t = centroid_from_bearings(pad_bearings);
  snap.beta_t = -scene.pad.normal.dot(snap.q_t);
  snap.phi_t =
      flow_factor * (state.v / std::max(snap.d_t, kDistanceFloor));

  // Window.
  if (!scene.window) return snap;
  snap.has_window = true;
  const WindowSpec& window = *scene.window;
  const auto corner_pts = window.corners();
  std::vector<Vec3> wb =
      spherical_project({corner_pts.begin(), corner_pts.end()}, state.xi);
  if (noise.bearing_sigma > 0.0) {
    for (Vec3& p : wb) p = tilt_bearing(p, noise.bearing_sigma, rng);
  }
  std::array<Vec3, 4> bearings = {wb[0], wb[1], wb[2], wb[3]};
  bool window_in_fov = true;
  for (int i = 0; i < 4; ++i) {
    window_in_fov = window_in_fov && scene.forward.in_fov(state.R, bearings[i]);
    snap.corner_bearings[i] = scene.forward.to_camera(state.R, bearings[i]);
  }
  snap.window_visible = window_in_fov && snap.d_o > 0.0;
  snap.q_w = centroid_from_bearings({bearings.begin(), bearings.end()});
  snap.alpha_w = weight_alpha(snap.q_w.norm(), eps, delta);

  if (snap.window_visible) {
    const auto h = edge_plane_normals(bearings);
    snap.frame = window_frame_from_lines(h, snap.q_w);
    snap.edge = closest_edge_direction(h, bearings, snap.frame);
    snap.qbar_w = weighted_window_centroid(bearings, snap.frame.eta,
                                           snap.edge.direction, snap.alpha_w);
    snap.phi_w = flow_factor *
                 window_flow(state.v, snap.d_o, snap.d_e, snap.alpha_w);
  } else {
    // Out-of-view fallback from scene geometry, for logging and the
    // open-loop crossing segment. Identities: qbar_w = alpha xi_w/d_o +
    // (1 - alpha) xi_w/d_e, with d_o clamped away from zero at the plane.
    snap.frame.u = window.u;
    snap.frame.rho = window.rho();
    snap.frame.eta = window.normal;
    snap.edge = closest_edge_geometric(window, state.xi);
    const Vec3 xi_w = state.xi - window.center;
    const double sd_o = clamp_away_from_zero(snap.d_o, kDistanceFloor);
    const double sd_e = std::max(snap.d_e, kDistanceFloor);
    snap.qbar_w =
        snap.alpha_w * (xi_w / sd_o) + (1.0 - snap.alpha_w) * (xi_w / sd_e);
    snap.phi_w = flow_factor * (snap.alpha_w * (state.v / sd_o) +
                                (1.0 - snap.alpha_w) * (state.v / sd_e));
  }
  return snap;
}

bool window_loss_detector(const std::array<Vec3, 4>& prev_bearings,
                          const std::array<Vec3, 4>& curr_bearings,
                          double threshold) {
  for (int i = 0; i < 4; ++i) {
    const double c =
        std::clamp(prev_bearings[i].dot(curr_bearings[i]), -1.0, 1.0);
    if (std::acos(c) > threshold) return true;
  }
  return false;
}

FlowOracle::FlowOracle(double cap_half_angle)
    : cap_half_angle_(cap_half_angle) {
  if (!(cap_half_angle > 0.0) ||
      cap_half_angle >= std::numbers::pi / 2.0) {
    throw ScenarioInvalid(fmt::format(
        "flow cap half-angle must lie in (0, pi/2), got {}", cap_half_angle));
  }
  // Self-calibration: quadrature of M = integral of (I - p p') (e3' p) dOmega
  // over the cap in its local frame (Gauss-Legendre in cos(theta), uniform in
  // azimuth). M is diagonal by symmetry: diag(lt, lt, ln).
  constexpr int kPolar = 64;
  constexpr int kAzimuth = 256;
  // 64-point Gauss-Legendre nodes/weights on [-1, 1] via Newton iteration.
  std::array<double, kPolar> node, weight;
  for (int i = 0; i < kPolar; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kPolar + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= kPolar; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = kPolar * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= kPolar; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = kPolar * (x * p1 - p0) / (x * x - 1.0);
    node[i] = x;
    weight[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  const double lo = std::cos(cap_half_angle);
  Mat3 m = Mat3::Zero();
  for (int i = 0; i < kPolar; ++i) {
    const double c = 0.5 * (1.0 - lo) * node[i] + 0.5 * (1.0 + lo);
    const double w_theta = 0.5 * (1.0 - lo) * weight[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int j = 0; j < kAzimuth; ++j) {
      const double phi =
          2.0 * std::numbers::pi * (j + 0.5) / kAzimuth;
      const Vec3 p(s * std::cos(phi), s * std::sin(phi), c);
      m += (w_theta * (2.0 * std::numbers::pi / kAzimuth) * c) *
           orthogonal_projector(p);
    }
  }
  lambda_tangent_ = 0.5 * (m(0, 0) + m(1, 1));
  lambda_normal_ = m(2, 2);
}

Mat3 FlowOracle::lambda(const UnitVec3& eta) const {
  return lambda_tangent_ * eta.projector() +
         lambda_normal_ * eta.vec() * eta.vec().transpose();
}

Vec3 FlowOracle::estimate(const Vec3& v, double d, const UnitVec3& eta,
                          int n_samples, std::uint64_t seed) const {
  if (d <= kDistanceFloor) {
    throw DegenerateDistance(
        fmt::format("plane distance {:.3e} below floor", d));
  }
  // Cap-local basis.
  const Vec3 seed_axis =
      std::abs(eta.vec().x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 a = eta.cross(seed_axis).normalized();
  const Vec3 b = eta.cross(a);

  Rng rng(seed);
  const double lo = std::cos(cap_half_angle_);
  Vec3 mean = Vec3::Zero();
  for (int i = 0; i < n_samples; ++i) {
    const double c = rng.uniform(lo, 1.0);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const Vec3 p = s * std::cos(phi) * a + s * std::sin(phi) * b +
                   c * eta.vec();
    const double along = eta.dot(p);
    if (along <= 0.0) {
      throw CapOutsidePlane("sampled view ray does not meet the plane");
    }
    // p_dot for a static plane point seen from a camera moving at v.
    mean += -(along / d) * (orthogonal_projector(p) * v);
  }
  mean /= static_cast<double>(n_samples);
  const double cap_area = 2.0 * std::numbers::pi * (1.0 - lo);
  const Vec3 integral = cap_area * mean;

  const Mat3 lam = lambda(eta);
  return -lam.ldlt().solve(integral);
}

Vec3 flow_from_sphere_samples(const Vec3& v, double d, const UnitVec3& eta,
                              double cap_half_angle, int n_samples,
                              std::uint64_t seed) {
  return FlowOracle(cap_half_angle).estimate(v, d, eta, n_samples, seed);
}

}  // namespace ibvs
