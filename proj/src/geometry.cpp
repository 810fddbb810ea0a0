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

#include "ibvs/geometry.hpp"

#include <cmath>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "ibvs/errors.hpp"

namespace ibvs {

namespace {
// Below this angle the Rodrigues coefficients use their series expansions.
constexpr double kSmallAngle = 1e-7;
}  // namespace

Vec3 normalize(const Vec3& v, double floor) {
  const double n = v.norm();
  if (n <= floor) {
    throw DegenerateVector(
        fmt::format("cannot normalize vector with norm {:.3e} (floor {:.3e})",
                    n, floor));
  }
  return v / n;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  // clang-format off
  m <<     0, -v.z(),  v.y(),
       v.z(),      0, -v.x(),
      -v.y(),  v.x(),      0;
  // clang-format on
  return m;
}

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

Mat3 orthogonal_projector(const Vec3& n) {
  return Mat3::Identity() - n * n.transpose();
}

Rot3::Rot3(const Mat3& m) : m_(m) {
  const double err = (m.transpose() * m - Mat3::Identity()).norm();
  if (err > kRotationTol || m.determinant() < 0) {
    throw NotARotation(fmt::format(
        "matrix is not a rotation: orthonormality error {:.3e}, det {:.6f}",
        err, m.determinant()));
  }
}

Rot3 Rot3::exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 K = skew(w);
  double a, b;  // exp = I + a K + b K^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Rot3(Mat3(Mat3::Identity() + a * K + b * K * K), 0);
}

Rot3 Rot3::rot_x(double angle) {
  return Rot3::exp(Vec3(angle, 0, 0));
}

Rot3 Rot3::rot_y(double angle) {
  return Rot3::exp(Vec3(0, angle, 0));
}

Rot3 Rot3::rot_z(double angle) {
  return Rot3::exp(Vec3(0, 0, angle));
}

double Rot3::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Rot3 Rot3::renormalized() const {
  Eigen::JacobiSVD<Mat3> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    // Flip the axis of least singular value to stay in SO(3).
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return Rot3(r, 0);
}

Vec3 Rot3::euler_zyx() const {
  const double pitch = std::asin(std::clamp(-m_(2, 0), -1.0, 1.0));
  double yaw, roll;
  if (std::abs(m_(2, 0)) < 1.0 - 1e-12) {
    yaw = std::atan2(m_(1, 0), m_(0, 0));
    roll = std::atan2(m_(2, 1), m_(2, 2));
  } else {
    // Gimbal lock: yaw/roll are coupled; put all rotation into yaw.
    yaw = std::atan2(-m_(0, 1), m_(1, 1));
    roll = 0.0;
  }
  return Vec3(yaw, pitch, roll);
}

Rot3 rotate_integrate(const Rot3& R, const Vec3& omega, double dt) {
  return R * Rot3::exp(omega * dt);
}

}  // namespace ibvs
