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

#ifndef IBVS_PERCEPTION_HPP_
#define IBVS_PERCEPTION_HPP_

#include <array>
#include <optional>
#include <vector>

#include "ibvs/dynamics.hpp"
#include "ibvs/geometry.hpp"
#include "ibvs/rng.hpp"

namespace ibvs {

// Distance below which per-feature direction ratios are considered singular.
inline constexpr double kDistanceFloor = 1e-6;

// Landing target: n >= 3 non-collinear coplanar markers with known plane
// normal eta_t (pointing away from the approach side, i.e. into the ground
// for a floor pad).
struct LandingPad {
  std::vector<Vec3> markers;
  UnitVec3 normal = UnitVec3(Vec3::UnitZ());

  Vec3 center() const;

  /// Throws ScenarioInvalid on fewer than 3 or collinear markers, or markers
  /// off the plane through center() by more than 1e-9.
  void validate() const;
};

// Rectangular window. Corners are ordered cyclically so that edge i runs
// from corner i to corner i+1 (mod 4); edges 0 and 2 are parallel to rho,
// edges 1 and 3 to u. The triad satisfies rho = u x normal.
struct WindowSpec {
  Vec3 center = Vec3::Zero();
  UnitVec3 normal = UnitVec3(Vec3::UnitX());  // eta_w, crossing direction
  UnitVec3 u = UnitVec3(Vec3::UnitY());       // in-plane, along the width
  double width = 1.0;   // r_w, metres along u
  double height = 1.0;  // metres along rho

  Vec3 rho() const { return u.cross(normal); }
  std::array<Vec3, 4> corners() const;

  /// Throws ScenarioInvalid if u is not orthogonal to normal (1e-9) or the
  /// extents are not positive.
  void validate() const;
};

// Pinhole-on-a-sphere camera: a mount rotation (camera-to-body) and a
// conical field of view about the camera z axis.
struct CameraModel {
  Rot3 mount;
  double fov_half_angle = 1.0471975511965976;  // rad

  /// Bearing (unit, inertial) mapped into the camera frame.
  Vec3 to_camera(const Rot3& R_body, const Vec3& bearing_inertial) const;

  /// True when the inertial bearing lies inside the view cone.
  bool in_fov(const Rot3& R_body, const Vec3& bearing_inertial) const;

  /// Mount used for a forward-looking camera when the scenario gives none.
  static Rot3 default_forward_mount();
};

struct FeatureNoise {
  double bearing_sigma = 0.0;        // rad, per-bearing random tilt
  double flow_relative_sigma = 0.0;  // multiplicative on flow vectors
  std::uint64_t seed = 1;
};

// Scene observed by the two cameras. The window is absent in landing-only
// scenarios.
struct SceneGeometry {
  LandingPad pad;
  std::optional<WindowSpec> window;
  CameraModel downward;  // identity mount
  CameraModel forward;   // default_forward_mount()
};

// Window frame recovered from the projected edge lines. Signs of u and rho
// are individually arbitrary (only the lines matter); eta is disambiguated
// by the caller-supplied centroid reference.
struct WindowFrame {
  Vec3 u = Vec3::UnitY();
  Vec3 rho = Vec3::UnitZ();
  UnitVec3 eta = UnitVec3(Vec3::UnitX());
};

struct ClosestEdge {
  Vec3 direction = Vec3::UnitX();  // l_e, unit, from the camera to the edge
  int index = 0;                   // 0..3
};

// Everything the controllers and the log consume at one instant. Feature
// values are the measured ones (noise applied); d_t/d_o/d_e are ground-truth
// diagnostics and reach the controllers only through flow ratios.
struct FeatureSnapshot {
  double t = 0.0;

  bool pad_visible = false;
  Vec3 q_t = Vec3::Zero();
  double beta_t = 0.0;  // -eta_t' q_t
  Vec3 phi_t = Vec3::Zero();
  double d_t = 0.0;

  bool has_window = false;
  bool window_visible = false;
  Vec3 q_w = Vec3::Zero();
  Vec3 qbar_w = Vec3::Zero();
  double alpha_w = 1.0;
  Vec3 phi_w = Vec3::Zero();
  WindowFrame frame;
  ClosestEdge edge;
  double d_o = 0.0;
  double d_e = 0.0;
  std::array<Vec3, 4> corner_bearings;  // forward-camera frame
};

/// Unit bearings from xi to each point. Throws DegenerateVector if xi is
/// within kDistanceFloor of a point.
std::vector<Vec3> spherical_project(const std::vector<Vec3>& points,
                                    const Vec3& xi);

/// q = -(1/n) sum of bearings. ||q|| <= 1 by construction.
Vec3 centroid_from_bearings(const std::vector<Vec3>& bearings);

/// Pad centroid q_t observed from xi (noise-free geometric value).
Vec3 pad_centroid(const LandingPad& pad, const Vec3& xi);

/// Window corner centroid q_w observed from xi (noise-free geometric value).
Vec3 window_centroid(const WindowSpec& window, const Vec3& xi);

/// Unit normals h_i of the planes spanned by the camera center and edge i,
/// from the corner bearings. Throws DegenerateVector if the camera lies on
/// an edge line.
std::array<Vec3, 4> edge_plane_normals(const std::array<Vec3, 4>& bearings);

/// Recovers (u, rho, eta) from the edge-plane normals using the parallel
/// edge pairs: rho ~ h0 x h2, u ~ h1 x h3. The eta sign is fixed so that
/// eta' q_ref < 0. Throws ParallelLines when an edge pair degenerates
/// (camera in the window plane) and WindowPlaneSingularity when q_ref gives
/// no usable sign.
WindowFrame window_frame_from_lines(const std::array<Vec3, 4>& h,
                                    const Vec3& q_ref);

/// Direction to the nearest window edge line: the candidate +-(h_i x rho)
/// (edges 0, 2) or +-(h_i x u) (edges 1, 3) maximizing |eta' l|, with the
/// sign fixed so the direction points at the edge. Ties pick the lowest
/// index.
ClosestEdge closest_edge_direction(const std::array<Vec3, 4>& h,
                                   const std::array<Vec3, 4>& bearings,
                                   const WindowFrame& frame);

/// Piecewise-linear weight: 0 for ||q_w|| <= eps, 1 for ||q_w|| >= eps +
/// delta, linear in between.
double weight_alpha(double q_w_norm, double eps, double delta);

/// Measured weighted centroid
///   qbar_w = -(1/4) sum p_i [alpha + (1 - alpha) eta' l_e] / (eta' p_i),
/// built purely from image quantities. Throws WindowPlaneSingularity when
/// some |eta' p_i| falls below 1e-9.
Vec3 weighted_window_centroid(const std::array<Vec3, 4>& bearings,
                              const UnitVec3& eta, const Vec3& l_e,
                              double alpha);

/// phi = v / d. Throws DegenerateDistance for d <= floor.
Vec3 translational_flow(const Vec3& v, double d,
                        double floor = kDistanceFloor);

/// Window flow alpha v/d_o + (1 - alpha) v/d_e.
Vec3 window_flow(const Vec3& v, double d_o, double d_e, double alpha,
                 double floor = kDistanceFloor);

struct Distances {
  double d_t = 0.0;  // -eta_t' xi_t, height above the pad plane
  double d_o = 0.0;  // -eta_w' xi_w, signed offset to the window plane
  double d_e = 0.0;  // distance to the nearest window edge line
};

/// Ground-truth distances; d_o/d_e are zero when the scene has no window.
Distances distances(const SceneGeometry& scene, const Vec3& xi);

/// Full observation pass; eps/delta parameterize the safety-region blend.
/// Bearing noise is a random small-angle tilt of each bearing; flow noise
/// scales the flow vectors by (1 + sigma n). Pad visibility requires every
/// marker inside the downward cone, d_t > 0, and (when a window exists) the
/// window plane already crossed. Window visibility requires every corner
/// inside the forward cone and d_o > 0. Window features are taken from the
/// image-quantity path while the window is visible and fall back to guarded
/// ground-truth identities afterwards so logged values stay finite.
FeatureSnapshot snapshot(const VehicleState& state, const SceneGeometry& scene,
                         const FeatureNoise& noise, double eps, double delta,
                         Rng& rng, double t);

/// True when any corner bearing moved by more than threshold radians
/// between consecutive frames.
bool window_loss_detector(const std::array<Vec3, 4>& prev_bearings,
                          const std::array<Vec3, 4>& curr_bearings,
                          double threshold);

// Monte-Carlo optical-flow integrator over a spherical cap of view
// directions looking at a plane. Self-calibrates the cap integral
//   Lambda = integral over the cap of (I - p p') (eta' p) dOmega
// by deterministic quadrature at construction; estimates recover v/d.
class FlowOracle {
 public:
  /// cap_half_angle in (0, pi/2). Throws ScenarioInvalid otherwise.
  explicit FlowOracle(double cap_half_angle);

  /// Monte-Carlo estimate of v/d from n sampled view rays against a plane
  /// with normal eta at distance d. Throws CapOutsidePlane if a sampled ray
  /// misses the plane, DegenerateDistance for d <= floor.
  Vec3 estimate(const Vec3& v, double d, const UnitVec3& eta, int n_samples,
                std::uint64_t seed) const;

  /// Calibrated cap matrix for a given plane normal.
  Mat3 lambda(const UnitVec3& eta) const;

  double cap_half_angle() const { return cap_half_angle_; }

 private:
  double cap_half_angle_;
  double lambda_tangent_ = 0.0;
  double lambda_normal_ = 0.0;
};

/// One-shot convenience wrapper around FlowOracle.
Vec3 flow_from_sphere_samples(const Vec3& v, double d, const UnitVec3& eta,
                              double cap_half_angle, int n_samples,
                              std::uint64_t seed);

}  // namespace ibvs

#endif  // IBVS_PERCEPTION_HPP_
