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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "ibvs/control.hpp"
#include "ibvs/errors.hpp"

using namespace ibvs;

TEST_CASE("gain matrices split the plane from the axis") {
  LandingGains g;
  g.kp12 = 4.0;
  g.kp3 = 1.75;
  const UnitVec3 eta(Vec3(1.0, -2.0, 0.5));
  const Mat3 kp = g.kp_matrix(eta);
  CHECK((kp * eta.vec() - 1.75 * eta.vec()).norm() < 1e-12);
  const Vec3 tangent = eta.projector() * Vec3(0.3, 0.9, -0.1);
  CHECK((kp * tangent - 4.0 * tangent).norm() < 1e-12);
  CHECK((kp - kp.transpose()).norm() < 1e-15);
}

TEST_CASE("landing force freezes to the hand-computed law") {
  LandingGains g;
  g.phi_star = 0.1;
  const VehicleParams params;  // 1.676 kg, 9.81 m/s^2
  const UnitVec3 eta(Vec3::UnitZ());
  const Vec3 q(0.1, -0.2, -0.9);
  const Vec3 phi(0.05, 0.02, -0.3);

  const Vec3 f = landing_force(q, phi, eta, g, params);
  // Kp q = (0.4, -0.8, -1.575); Kd (phi - eta phi*) = (0.2, 0.08, -1.6);
  // weight = (0, 0, 16.44156).
  CHECK(f.x() == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(f.y() == doctest::Approx(-0.72).epsilon(1e-12));
  CHECK(f.z() == doctest::Approx(13.26656).epsilon(1e-12));

  // Equilibrium shape: zero feature and on-target flow command pure hover.
  const Vec3 hover =
      landing_force(Vec3::Zero(), eta.vec() * 0.1, eta, g, params);
  CHECK((hover - params.hover_force()).norm() < 1e-12);
}

TEST_CASE("sigma gates on the feature side of the window plane") {
  const UnitVec3 eta(Vec3::UnitX());
  CHECK(sigma(Vec3(-0.5, 0.2, 0.0), eta) == 1.0);
  CHECK(sigma(Vec3(0.1, 0.0, 0.0), eta) == 0.0);
  CHECK(sigma(Vec3::Zero(), eta) == 0.0);
  CHECK(sigma(Vec3(0.0, 0.7, -0.3), eta) == 0.0);
}

TEST_CASE("window force freezes to the hand-computed law") {
  WindowGains g;  // kp 1, kd 0.8, kphi 1, phi* 0.3
  const VehicleParams params;
  const UnitVec3 eta(Vec3::UnitX());
  const Vec3 qbar(-0.9, 0.2, -0.1);
  const Vec3 phi(0.15, -0.05, 0.02);
  const Vec3 q_w(-0.8, 0.1, 0.0);

  const Vec3 f = window_force(qbar, phi, q_w, eta, g, params);
  CHECK(f.x() == doctest::Approx(-0.15).epsilon(1e-12));
  CHECK(f.y() == doctest::Approx(0.16).epsilon(1e-12));
  CHECK(f.z() == doctest::Approx(16.357560).epsilon(1e-9));

  // The along-normal component carries only the flow-tracking term: the
  // in-plane gains act through the projector.
  CHECK(eta.dot(f) ==
        doctest::Approx(g.kphi * (eta.dot(phi) - g.phi_star)).epsilon(1e-12));

  // At or past the plane the whole command gates to zero.
  CHECK(window_force(qbar, phi, Vec3(0.2, 0.0, 0.0), eta, g, params).norm() ==
        0.0);
}

TEST_CASE("gain validator reproduces the documented margins") {
  const LandingGains lg;   // phi* = 0
  WindowGains wg;          // kd 0.8, kp 1, eps 0.2
  wg.epsilon = 0.25;

  GainReport ok = validate_gains(lg, wg, 1.0, 0.0, 0.0);
  REQUIRE(ok.conditions.size() == 3);
  CHECK(ok.all_pass());
  CHECK(ok.conditions[0].name == "window damping k_d^2/k_p > r_w/2");
  CHECK(ok.conditions[0].value == doctest::Approx(0.64));
  CHECK(ok.conditions[0].threshold == doctest::Approx(0.5));
  CHECK(ok.conditions[0].margin() == doctest::Approx(0.14));

  // A wider window tightens the damping requirement past the gains.
  GainReport wide = validate_gains(lg, wg, 1.4, 0.0, 0.0);
  CHECK_FALSE(wide.all_pass());
  CHECK_FALSE(wide.conditions[0].pass);
  CHECK(wide.conditions[0].threshold == doctest::Approx(0.7));
  CHECK(wide.conditions[1].pass);
  CHECK(wide.conditions[2].pass);
}

TEST_CASE("gain validator applies strict and inclusive bounds as declared") {
  LandingGains lg;
  WindowGains wg;
  wg.epsilon = 0.2;

  // Landing flow condition is inclusive: equality passes.
  lg.phi_star = 0.3 / lg.kd3;
  GainReport r = validate_gains(lg, wg, 1.0, 0.0, 0.3);
  CHECK(r.conditions[2].pass);
  lg.phi_star = 0.3 / lg.kd3 - 1e-9;
  CHECK_FALSE(validate_gains(lg, wg, 1.0, 0.0, 0.3).conditions[2].pass);

  // Window flow condition is strict: equality fails.
  lg.phi_star = 0.0;
  wg.phi_star = 0.1 / wg.kphi + wg.epsilon;
  CHECK_FALSE(validate_gains(lg, wg, 1.0, 0.1, 0.0).conditions[1].pass);
  wg.phi_star += 1e-6;
  CHECK(validate_gains(lg, wg, 1.0, 0.1, 0.0).conditions[1].pass);
}

TEST_CASE("attitude setpoint aligns the thrust axis with the force") {
  // Hover command: identity attitude, thrust = ||F||.
  const AttitudeSetpoint hover = attitude_setpoint(Vec3(0, 0, 16.44156), 0.0);
  CHECK((hover.R_d.matrix() - Mat3::Identity()).norm() < 1e-12);
  CHECK(hover.thrust == doctest::Approx(16.44156));

  // Pure yaw carries into the first body axis.
  const double yaw = 0.6;
  const AttitudeSetpoint yawed = attitude_setpoint(Vec3(0, 0, 10.0), yaw);
  CHECK((yawed.R_d.matrix() - Rot3::rot_z(yaw).matrix()).norm() < 1e-12);

  // Tilted force: third column along F/||F||, first orthogonal to it and
  // in the yaw half-plane, right-handed triad.
  const Vec3 f(3.0, -1.0, 15.0);
  const AttitudeSetpoint tilted = attitude_setpoint(f, yaw);
  const Mat3 rd = tilted.R_d.matrix();
  CHECK((rd.col(2) - f.normalized()).norm() < 1e-12);
  CHECK(tilted.thrust == doctest::Approx(f.norm()));
  CHECK(tilted.R_d.orthonormality_error() < 1e-12);
  CHECK(std::abs(rd.col(0).dot(f)) < 1e-12);
  CHECK((rd.col(0).cross(rd.col(1)) - rd.col(2)).norm() < 1e-12);
  // col(0) is the yaw heading Gram-Schmidt'd against the thrust axis.
  const Vec3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  CHECK(rd.col(0).dot(heading) > 0.9);

  CHECK_THROWS_AS(attitude_setpoint(Vec3(0.0, 0.0, 0.05), 0.0), ZeroForce);
  // Force along the yaw heading: the projection degenerates.
  CHECK_THROWS_AS(attitude_setpoint(Vec3(5.0, 0.0, 0.0), 0.0), YawSingularity);
}

TEST_CASE("attitude torque is PD with gyroscopic feed-forward") {
  const VehicleParams params;
  AttitudeGains g;  // kR 5, kOmega 0.5

  // On the setpoint with spinning body: pure damping plus feed-forward.
  const Rot3 r = Rot3::exp(Vec3(0.2, -0.1, 0.4));
  const Vec3 omega(0.3, -0.2, 0.5);
  const Vec3 tau = attitude_torque(r, omega, r, g, params);
  const Vec3 expect = -g.kOmega * omega +
                      omega.cross(params.inertia * omega);
  CHECK((tau - expect).norm() < 1e-12);

  // Small attitude error about x: e_R ~ the error angle, torque ~ -kR e.
  const double err = 1e-4;
  const Vec3 tau_err = attitude_torque(Rot3::rot_x(err), Vec3::Zero(),
                                       Rot3::identity(), g, params);
  CHECK(tau_err.x() == doctest::Approx(-g.kR * err).epsilon(1e-6));
  CHECK(std::abs(tau_err.y()) < 1e-12);
  CHECK(std::abs(tau_err.z()) < 1e-12);
}

TEST_CASE("boresight yaw solves the level-look heading") {
  // Body-x boresight looking along +x needs no yaw.
  CHECK(boresight_yaw(Vec3::UnitX(), Vec3::UnitX()) == doctest::Approx(0.0));
  CHECK(boresight_yaw(Vec3::UnitX(), Vec3::UnitY()) ==
        doctest::Approx(std::numbers::pi / 2.0));
  // The bundled forward camera boresight sits on the body diagonal; looking
  // along +x then requires yaw 3 pi / 4.
  const Vec3 diag(-std::sqrt(0.5), -std::sqrt(0.5), 0.0);
  CHECK(boresight_yaw(diag, Vec3::UnitX()) ==
        doctest::Approx(3.0 * std::numbers::pi / 4.0));
  // Rotating a level body by the answer really aligns the projections.
  const double yaw = boresight_yaw(diag, Vec3(0.3, -0.8, 0.0));
  const Vec3 world = Rot3::rot_z(yaw) * diag;
  CHECK(std::atan2(world.y(), world.x()) ==
        doctest::Approx(std::atan2(-0.8, 0.3)));

  CHECK_THROWS_AS(boresight_yaw(Vec3::UnitZ(), Vec3::UnitX()), YawSingularity);
  CHECK_THROWS_AS(boresight_yaw(Vec3::UnitX(), Vec3::UnitZ()), YawSingularity);
}
