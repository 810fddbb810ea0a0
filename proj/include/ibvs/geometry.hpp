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

#ifndef IBVS_GEOMETRY_HPP_
#define IBVS_GEOMETRY_HPP_

#include <Eigen/Dense>

namespace ibvs {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Norm below which a vector has no usable direction.
inline constexpr double kNormFloor = 1e-12;

// Orthonormality tolerance accepted when validating a rotation matrix.
inline constexpr double kRotationTol = 1e-9;

/// Safe normalization. Throws DegenerateVector if ||v|| <= floor.
Vec3 normalize(const Vec3& v, double floor = kNormFloor);

/// Skew-symmetric matrix S(v) with S(v) * w == v x w.
Mat3 skew(const Vec3& v);

/// Inverse of skew: vee(S(v)) == v. Input is assumed skew-symmetric.
Vec3 vee(const Mat3& m);

/// Projector onto the plane orthogonal to unit vector n: I - n n^T.
Mat3 orthogonal_projector(const Vec3& n);

// Unit vector. Construction normalizes and rejects degenerate input, so a
// held value is always usable as a direction.
class UnitVec3 {
 public:
  UnitVec3() : v_(Vec3::UnitZ()) {}
  explicit UnitVec3(const Vec3& v, double floor = kNormFloor)
      : v_(normalize(v, floor)) {}

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }

  double dot(const Vec3& other) const { return v_.dot(other); }
  Vec3 cross(const Vec3& other) const { return v_.cross(other); }
  UnitVec3 negated() const { return UnitVec3(unchecked_tag{}, -v_); }

  /// I - v v^T.
  Mat3 projector() const { return orthogonal_projector(v_); }

 private:
  struct unchecked_tag {};
  UnitVec3(unchecked_tag, const Vec3& v) : v_(v) {}
  Vec3 v_;
};

// Rotation matrix in SO(3). The checked constructor enforces R^T R = I and
// det R = +1 to kRotationTol; composition and the exponential preserve the
// invariant by construction.
class Rot3 {
 public:
  Rot3() : m_(Mat3::Identity()) {}

  /// Validating constructor; throws NotARotation outside tolerance.
  explicit Rot3(const Mat3& m);

  /// Wraps a matrix already known to lie in SO(3) (internal fast path).
  static Rot3 from_matrix_unchecked(const Mat3& m) { return Rot3(m, 0); }

  static Rot3 identity() { return Rot3(); }

  /// Exponential map: rotation by ||w|| radians about w / ||w||.
  static Rot3 exp(const Vec3& w);

  static Rot3 rot_x(double angle);
  static Rot3 rot_y(double angle);
  static Rot3 rot_z(double angle);

  const Mat3& matrix() const { return m_; }

  Rot3 transposed() const { return Rot3(m_.transpose(), 0); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  Rot3 operator*(const Rot3& other) const { return Rot3(m_ * other.m_, 0); }

  /// Deviation from orthonormality: ||R^T R - I||_F.
  double orthonormality_error() const;

  /// Nearest rotation in the Frobenius sense (polar factor via SVD).
  Rot3 renormalized() const;

  /// ZYX (yaw, pitch, roll) factorization: R = Rz(yaw) Ry(pitch) Rx(roll).
  Vec3 euler_zyx() const;

 private:
  Rot3(const Mat3& m, int) : m_(m) {}
  Mat3 m_;
};

/// Advances R by the body rate held constant over dt: R * exp(S(omega) dt).
/// Closed-form Rodrigues update; stays in SO(3) to machine precision.
Rot3 rotate_integrate(const Rot3& R, const Vec3& omega, double dt);

}  // namespace ibvs

#endif  // IBVS_GEOMETRY_HPP_
