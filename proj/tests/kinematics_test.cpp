// Copyright 2026 The UPS Hopper Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hopper/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

namespace hopper {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(Kinematics, GoldenFootPosition) {
  const LegGeometry leg;
  const Vec2 foot = forward_kinematics(leg, Vec2(0.0, 0.4), 0.0, Vec2(kPi / 2, -kPi / 2));
  EXPECT_NEAR(foot.x(), 0.2, 1e-15);
  EXPECT_NEAR(foot.y(), 0.2, 1e-15);
}

TEST(Kinematics, IdentityPoseIsLegChain) {
  const LegGeometry leg;
  const Vec2 q(0.3, -1.1);
  EXPECT_TRUE(forward_kinematics(leg, Vec2(0.0, 0.0), 0.0, q).isApprox(leg_chain(leg, q), 0.0));
}

TEST(Kinematics, PitchPreservesReach) {
  const LegGeometry leg;
  const Vec2 com(0.4, 0.7);
  const Vec2 q(0.5, -1.4);
  const double a = (forward_kinematics(leg, com, 0.0, q) - com).norm();
  const double b = (forward_kinematics(leg, com, kPi, q) - com).norm();
  EXPECT_NEAR(a, b, 1e-14);
}

TEST(Kinematics, InverseRoundTrip) {
  const LegGeometry leg;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> reach(0.02, 0.399);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 com(coord(rng), coord(rng));
    const double pitch = angle(rng);
    const double r = reach(rng);
    const double dir = angle(rng);
    const Vec2 foot = com + r * Vec2(std::sin(dir), -std::cos(dir));
    const Vec2 q = inverse_kinematics(leg, com, pitch, foot);
    EXPECT_LT((forward_kinematics(leg, com, pitch, q) - foot).norm(), 1e-10);
    EXPECT_LE(q(1), 0.0);
  }
}

TEST(Kinematics, FullExtensionGivesStraightKnee) {
  const LegGeometry leg;
  const Vec2 q = inverse_kinematics(leg, Vec2(0.0, 0.5), 0.0, Vec2(0.0, 0.1));
  EXPECT_NEAR(q(1), 0.0, 1e-7);
  EXPECT_NEAR(q(0), 0.0, 1e-7);
}

TEST(Kinematics, UnreachableTargetThrows) {
  const LegGeometry leg;
  try {
    inverse_kinematics(leg, Vec2(0.0, 0.41), 0.0, Vec2(0.0, 0.0));
    FAIL() << "expected OutOfWorkspace";
  } catch (const OutOfWorkspace& e) {
    EXPECT_NEAR(e.requested(), 0.41, 1e-12);
    EXPECT_NEAR(e.max_reach(), 0.40, 1e-12);
  }
}

TEST(Kinematics, ClampedIkProjectsOntoBoundary) {
  const LegGeometry leg;
  const IkResult r = inverse_kinematics_clamped(leg, Vec2(0.0, 0.5), 0.0, Vec2(0.0, 0.0));
  EXPECT_TRUE(r.clamped);
  EXPECT_NEAR((forward_kinematics(leg, Vec2(0.0, 0.5), 0.0, r.q) - Vec2(0.0, 0.1)).norm(), 0.0,
              1e-9);
}

TEST(Kinematics, JacobianMatchesCentralDifferences) {
  const LegGeometry leg{0.21, 0.19, Vec2(0.02, -0.03)};
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Matrix<double, 5, 1> g;
    for (int i = 0; i < 5; ++i) g(i) = u(rng);
    auto fk = [&](const Eigen::Matrix<double, 5, 1>& v) {
      return forward_kinematics(leg, Vec2(v(0), v(1)), v(2), Vec2(v(3), v(4)));
    };
    const Jacobian25 J = foot_jacobian(leg, g(2), Vec2(g(3), g(4)));
    EXPECT_TRUE(J.leftCols<2>().isIdentity(0.0));
    for (int i = 0; i < 5; ++i) {
      Eigen::Matrix<double, 5, 1> p = g, m = g;
      p(i) += h;
      m(i) -= h;
      const Vec2 fd = (fk(p) - fk(m)) / (2 * h);
      for (int r = 0; r < 2; ++r) {
        EXPECT_LE(std::abs(fd(r) - J(r, i)), 1e-6 * std::max(1.0, std::abs(J(r, i))));
      }
    }
  }
}

TEST(Kinematics, StraightLegIsSingular) {
  const LegGeometry leg;
  EXPECT_NEAR(joint_jacobian(leg, 0.3, Vec2(0.4, 0.0)).determinant(), 0.0, 1e-15);
}

TEST(Kinematics, UpsTorqueCurve) {
  UpsModel ups{20.0, -1.2, true};
  EXPECT_EQ(ups_torque(-1.2, ups), 0.0);
  EXPECT_EQ(ups_torque(-0.7, ups), 0.0);
  EXPECT_NEAR(ups_torque(-1.7, ups), 10.0, 1e-12);
  ups.enabled = false;
  EXPECT_EQ(ups_torque(-1.7, ups), 0.0);
}

TEST(Kinematics, UpsTorqueMonotone) {
  const UpsModel ups;
  double prev = ups_torque(-0.5, ups);
  for (double qk = -0.5; qk > -2.45; qk -= 0.01) {
    EXPECT_GE(ups_torque(qk, ups), prev);
    prev = ups_torque(qk, ups);
  }
}

TEST(Kinematics, SelectionMatrix) {
  const auto S = selection_matrix();
  Eigen::Matrix<double, 5, 1> v;
  v << 1, 2, 3, 4, 5;
  EXPECT_EQ(S * v, Vec2(4, 5));
  for (int r = 0; r < 2; ++r) {
    EXPECT_EQ((S.row(r).array() == 1.0).count(), 1);
    EXPECT_EQ(S.row(r).cwiseAbs().sum(), 1.0);
  }
}

TEST(Kinematics, VerticalForceMomentArms) {
  // Foot straight under the hip at 0.32 m: cos(beta) = 0.8, knee sits 0.12 m
  // ahead of the foot line.
  const LegGeometry leg;
  const double beta = std::acos(0.8);
  const Vec2 q(beta, -2 * beta);
  const Jacobian25 J = foot_jacobian(leg, 0.0, q);
  const Vec2 moments = selection_matrix() * J.transpose() * Vec2(0.0, 100.0);
  EXPECT_NEAR(moments(0), 0.0, 1e-12);
  EXPECT_NEAR(moments(1), -12.0, 1e-12);
}

TEST(Kinematics, StanceTorqueRoundTrip) {
  const LegGeometry leg;
  const UpsModel ups;
  const Vec2 q(0.7, -1.5);
  const Jacobian25 J = foot_jacobian(leg, 0.1, q);
  const Vec2 f(8.0, 40.0);
  const Vec2 tau = stance_motor_torque(J, f, q, ups);
  EXPECT_LT((grf_from_motor_torque(J.rightCols<2>(), tau, q, ups) - f).norm(), 1e-12);
  UpsModel off = ups;
  off.enabled = false;
  const Vec2 tau_off = stance_motor_torque(J, f, q, off);
  EXPECT_NEAR(tau_off(1) - tau(1), ups_torque(q(1), ups), 1e-12);
  EXPECT_EQ(tau_off(0), tau(0));
}

TEST(Kinematics, GeometryValidation) {
  EXPECT_THROW(validate_geometry(LegGeometry{0.1, 0.1, Vec2::Zero()}, 0.32), SchemaError);
  EXPECT_THROW(validate_geometry(LegGeometry{-0.2, 0.6, Vec2::Zero()}, 0.32), SchemaError);
  EXPECT_NO_THROW(validate_geometry(LegGeometry{}, 0.32));
}

}  // namespace
}  // namespace hopper
