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
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hopper/plant.hpp"

namespace hopper {
namespace {

constexpr double kG = 9.81;

// Joint block of the foot Jacobian by central differences of the forward map.
Mat2 fd_joint_jacobian(const LegGeometry& leg, const RobotState& x) {
  Mat2 J;
  const double h = 1e-6;
  for (int i = 0; i < 2; ++i) {
    Vec2 qp = x.q, qm = x.q;
    qp(i) += h;
    qm(i) -= h;
    J.col(i) = (forward_kinematics(leg, x.p_c, x.theta, qp) -
                forward_kinematics(leg, x.p_c, x.theta, qm)) / (2.0 * h);
  }
  return J;
}

double knee_spring(double q_knee, const UpsModel& ups) {
  return ups.enabled ? ups.stiffness * std::max(0.0, ups.engagement_angle - q_knee) : 0.0;
}

Plant make_plant(bool ups) {
  UpsModel u;
  u.enabled = ups;
  return Plant(RobotConstants{}, LegGeometry{}, u);
}

ActuationCommand hold(const Vec2& q) {
  ActuationCommand c;
  c.mode = CommandMode::kSwing;
  c.q_des = q;
  return c;
}

TEST(Plant, FlightFollowsTheBallisticArc) {
  const Plant plant = make_plant(true);
  const Vec2 p0(0.1, 1.5), v0(0.8, 1.2);
  PlantState s = plant.flight_state(p0, v0, Vec2(0.4, -1.3));
  const ActuationCommand cmd = hold(s.robot.q);
  double worst = 0.0;
  std::vector<PlantState> history{s};
  for (int i = 0; i < 300; ++i) {
    const StepResult r = plant.step(s, cmd, 1e-3);
    ASSERT_EQ(r.event, PlantEvent::kNone);
    s = r.state;
    history.push_back(s);
    const double t = s.time;
    const Vec2 exact = p0 + v0 * t + 0.5 * Vec2(0.0, -kG) * t * t;
    worst = std::max(worst, (s.robot.p_c - exact).cwiseAbs().maxCoeff());
  }
  EXPECT_LT(worst, 1e-9);
  const auto apexes = detect_apex(history, kG);
  ASSERT_EQ(apexes.size(), 1u);
  EXPECT_NEAR(apexes[0].time, v0.y() / kG, 1e-9);
  EXPECT_NEAR(apexes[0].apex.height, p0.y() + v0.y() * v0.y() / (2.0 * kG), 1e-8);
  EXPECT_NEAR(apexes[0].apex.velocity, v0.x(), 1e-12);
}

TEST(Plant, DescendingFlightHasNoApex) {
  const Plant plant = make_plant(true);
  PlantState s = plant.flight_state(Vec2(0.0, 1.5), Vec2(0.3, -0.5), Vec2(0.4, -1.3));
  std::vector<PlantState> history{s};
  for (int i = 0; i < 100; ++i) {
    s = plant.step(s, hold(s.robot.q), 1e-3).state;
    history.push_back(s);
  }
  EXPECT_TRUE(detect_apex(history, kG).empty());
}

TEST(Plant, SymmetricHopApexAtMidFlight) {
  // Liftoff and touchdown at the same height with the same speed.
  const Plant plant = make_plant(true);
  const double vz = 1.3;
  PlantState s = plant.flight_state(Vec2(0.0, 0.3), Vec2(0.0, vz), Vec2(0.3, -1.0));
  std::vector<PlantState> history{s};
  while (!(s.robot.v_c.y() < 0.0 && s.robot.p_c.y() <= 0.3)) {
    s = plant.step(s, hold(s.robot.q), 1e-3).state;
    history.push_back(s);
  }
  const double t_land = 2.0 * vz / kG;
  const auto apexes = detect_apex(history, kG);
  ASSERT_EQ(apexes.size(), 1u);
  EXPECT_NEAR(apexes[0].time, 0.5 * t_land, 1e-6);
}

TEST(Plant, StaticStanceHoldsStill) {
  const Plant plant = make_plant(true);
  PlantState s = plant.stance_state(Vec2(0.0, 0.3), Vec2::Zero(), Vec2(0.0, 0.0));
  const RobotState x0 = s.robot;
  const Vec2 f(0.0, 2.5 * kG);
  const Mat2 J = fd_joint_jacobian(plant.leg(), s.robot);
  // Motor and spring together balance the force map.
  const Vec2 tau = -J.transpose() * f - Vec2(0.0, knee_spring(s.robot.q(1), plant.ups()));
  EXPECT_LT((plant.stance_torque(s, f) - tau).norm(), 1e-6);
  ActuationCommand cmd;
  cmd.mode = CommandMode::kStance;
  cmd.tau = tau;
  for (int i = 0; i < 1000; ++i) {
    const StepResult r = plant.step(s, cmd, 1e-3);
    ASSERT_EQ(r.event, PlantEvent::kNone);
    s = r.state;
  }
  EXPECT_NEAR(s.time, 1.0, 1e-12);
  EXPECT_LT((s.robot.p_c - x0.p_c).norm(), 1e-8);
  EXPECT_LT(s.robot.v_c.norm(), 1e-8);
  EXPECT_LT(std::abs(s.robot.theta), 1e-8);
  EXPECT_LT((s.robot.q - x0.q).norm(), 1e-8);
}

TEST(Plant, SpringAloneProducesThrust) {
  const Plant plant = make_plant(true);
  const PlantState s = plant.stance_state(Vec2(0.02, 0.26), Vec2::Zero(), Vec2(0.0, 0.0));
  const double ts = knee_spring(s.robot.q(1), plant.ups());
  ASSERT_GT(ts, 0.0);
  const Mat2 J = fd_joint_jacobian(plant.leg(), s.robot);
  const Vec2 expected = -J.transpose().inverse() * Vec2(0.0, ts);
  const Vec2 f = plant.stance_grf(s, Vec2::Zero());
  EXPECT_LT((f - expected).norm(), 1e-5 * expected.norm());
  EXPECT_GT(f.y(), 0.0);
}

TEST(Plant, ReportedForceSatisfiesTheTorqueMap) {
  const Plant plant = make_plant(true);
  PlantState s = plant.stance_state(Vec2(-0.03, 0.29), Vec2(0.4, -0.3), Vec2(0.0, 0.0));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    ActuationCommand cmd;
    cmd.mode = CommandMode::kStance;
    const Vec2 f(2.0 * u(rng), 40.0 + 5.0 * u(rng));
    cmd.tau = plant.stance_torque(s, f);
    const StepResult r = plant.step(s, cmd, 1e-3);
    if (r.event != PlantEvent::kNone) break;
    const Mat2 J = fd_joint_jacobian(plant.leg(), r.state.robot);
    const Vec2 lhs = r.tau + Vec2(0.0, knee_spring(r.state.robot.q(1), plant.ups()));
    EXPECT_LT((lhs + J.transpose() * r.grf).norm(), 1e-5) << i;
    s = r.state;
  }
}

TEST(Plant, TouchdownKeepsVelocity) {
  const Plant plant = make_plant(true);
  const Vec2 p0(0.0, 0.40), v0(1.0, -0.5);
  PlantState s = plant.flight_state(p0, v0, Vec2(0.55, -1.287));
  const ActuationCommand cmd = hold(s.robot.q);
  StepResult r;
  for (int i = 0; i < 200; ++i) {
    r = plant.step(s, cmd, 1e-3);
    s = r.state;
    if (r.event == PlantEvent::kTouchdown) break;
  }
  ASSERT_EQ(r.event, PlantEvent::kTouchdown);
  EXPECT_EQ(s.phase, Phase::kStance);
  const Vec2 v_exact = v0 + Vec2(0.0, -kG) * s.time;
  EXPECT_LT((s.robot.v_c - v_exact).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(s.stance_foot.y(), 0.0, 1e-9);
  EXPECT_NEAR(plant.foot_position(s).y(), 0.0, 1e-9);
}

TEST(Plant, PinnedFootDoesNoWork) {
  // Spring off: the torso energy changes only by the work of the motors.
  const Plant plant = make_plant(false);
  PlantState s = plant.stance_state(Vec2(0.01, 0.29), Vec2(0.3, -0.2), Vec2(0.0, 0.0));
  auto energy = [](const PlantState& x) {
    return 0.5 * 2.5 * x.robot.v_c.squaredNorm() + 0.5 * 0.05 * x.robot.theta_dot * x.robot.theta_dot +
           2.5 * kG * x.robot.p_c.y();
  };
  ActuationCommand cmd;
  cmd.mode = CommandMode::kStance;
  cmd.tau = plant.stance_torque(s, Vec2(1.0, 30.0));
  const double e0 = energy(s);
  double work = 0.0;
  double p_prev = cmd.tau.dot(s.robot.qdot);
  double elapsed = 0.0;
  for (int i = 0; i < 500; ++i) {
    const StepResult r = plant.step(s, cmd, 1e-4);
    const double p = r.tau.dot(r.state.robot.qdot);
    work += 0.5 * (p + p_prev) * r.elapsed;
    p_prev = p;
    elapsed += r.elapsed;
    s = r.state;
    if (r.event != PlantEvent::kNone) break;
  }
  ASSERT_GT(elapsed, 0.01);
  EXPECT_LT(std::abs(energy(s) - e0 - work) / elapsed, 1e-6);
}

TEST(Plant, ConeViolationFaults) {
  const Plant plant = make_plant(false);
  const PlantState s = plant.stance_state(Vec2(0.0, 0.3), Vec2::Zero(), Vec2(0.0, 0.0));
  ActuationCommand cmd;
  cmd.mode = CommandMode::kStance;
  cmd.tau = plant.stance_torque(s, Vec2(30.0, 20.0));
  EXPECT_THROW(plant.step(s, cmd, 1e-3), PlantFault);
}

TEST(Plant, AppliedTorqueIsClamped) {
  const Plant plant = make_plant(true);
  const PlantState s = plant.flight_state(Vec2(0.0, 1.0), Vec2::Zero(), Vec2(0.4, -1.3));
  ActuationCommand cmd = hold(Vec2(1.5, -0.9));
  cmd.kp = Vec2(1e4, 1e4);
  const Vec2 tau = plant.applied_torque(s, cmd);
  EXPECT_LE(tau.cwiseAbs().maxCoeff(), 25.0);
}

TEST(Plant, SettingsValidation) {
  PlantSettings p;
  p.dt = 2e-3;
  EXPECT_THROW(p.validate(), SchemaError);
}

}  // namespace
}  // namespace hopper
