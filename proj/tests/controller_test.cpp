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
#include <memory>

#include "hopper/controller.hpp"
#include "hopper/simulation.hpp"

namespace hopper {
namespace {

std::shared_ptr<const GaitLibrary> library() {
  static const auto lib = std::make_shared<const GaitLibrary>(GaitLibrary::build(SlipParams{}));
  return lib;
}

RunResult run(double speed, int hops, bool ups = true, double start_speed = 0.0) {
  RunSetup setup;
  setup.ups.enabled = ups;
  RunOptions o;
  o.profile = {{hops, speed}};
  o.start_speed = start_speed;
  return run_closed_loop(setup, library(), o);
}

const RunResult& in_place() {
  static const RunResult r = run(0.0, 10);
  return r;
}

TEST(Cone, ProjectionIsIdentityInside) {
  EXPECT_EQ(project_to_cone(Vec2(1.0, 10.0), 0.7), Vec2(1.0, 10.0));
}

TEST(Cone, ProjectionLandsOnTheEdge) {
  const Vec2 f = project_to_cone(Vec2(10.0, 10.0), 0.5);
  EXPECT_NEAR(std::abs(f.x()), 0.5 * f.y(), 1e-12);
  // Residual is normal to the edge.
  EXPECT_NEAR((Vec2(10.0, 10.0) - f).dot(Vec2(0.5, 1.0)), 0.0, 1e-12);
  EXPECT_EQ(project_to_cone(Vec2(1.0, -5.0), 0.7), Vec2::Zero());
}

TEST(Controller, InPlaceRunCompletes) {
  const RunResult& r = in_place();
  ASSERT_TRUE(r.completed) << r.fault.value_or("");
  EXPECT_EQ(r.apexes.size(), 11u);
  EXPECT_EQ(r.degraded_ticks, 0);
  for (const ApexRecord& a : r.apexes) EXPECT_NEAR(a.apex.velocity, 0.0, 0.05);
}

TEST(Controller, VerticalHopKeepsTheLegVertical) {
  RunSetup setup;
  RunOptions o;
  o.profile = {{6, 0.0}};
  o.height_jitter = 0.0;
  o.speed_jitter = 0.0;
  const RunResult r = run_closed_loop(setup, library(), o);
  ASSERT_TRUE(r.completed);
  for (const TickRecord& t : r.ticks) {
    if (t.telemetry.apex_update && t.index > 0) EXPECT_LT(std::abs(t.telemetry.alpha), 1e-3) << t.index;
  }
}

TEST(Controller, KinodynamicSolvesMeetTolerance) {
  const RunResult& r = in_place();
  ASSERT_GT(r.mpc_ticks, 0);
  EXPECT_LE(r.violation_ticks, 0.05 * r.mpc_ticks);
}

TEST(Controller, TorquesWithinLimits) {
  for (const TorqueSample& t : in_place().torques) EXPECT_LE(t.tau.cwiseAbs().maxCoeff(), 25.0 + 1e-9);
}

TEST(Controller, ModeFollowsContactEvents) {
  const RunResult& r = in_place();
  int resets = 0, apex_updates = 0;
  for (const TickRecord& t : r.ticks) {
    resets += t.telemetry.touchdown_reset;
    apex_updates += t.telemetry.apex_update;
  }
  EXPECT_EQ(resets, static_cast<int>(r.touchdowns.size()));
  // One regeneration per flight: the initial flight and one after each touchdown.
  EXPECT_EQ(apex_updates, static_cast<int>(r.touchdowns.size()) + 1);
  // The tick that sees a touchdown routes stance torque.
  for (const TickRecord& t : r.ticks) {
    if (t.telemetry.touchdown_reset) EXPECT_EQ(t.telemetry.mode, Phase::kStance);
  }
}

TEST(Controller, StandingStartReachesCommand) {
  const RunResult r = run(1.0, 6);
  ASSERT_TRUE(r.completed) << r.fault.value_or("");
  for (std::size_t i = 3; i < r.apexes.size(); ++i) {
    EXPECT_NEAR(r.apexes[i].apex.velocity, 1.0, 0.1) << i;
  }
  EXPECT_LE(r.max_abs_pitch, 0.25);
}

TEST(Controller, SpringReducesEnergy) {
  const RunResult off = run(0.0, 10, false);
  ASSERT_TRUE(off.completed);
  EXPECT_LT(in_place().energy, off.energy);
}

TEST(Controller, RequiresLibrary) {
  RunSetup s;
  EXPECT_THROW(Controller(nullptr, make_kino_model(s.constants, s.leg, s.ups)), std::invalid_argument);
}

TEST(Simulation, SteadyWindowNeedsSettledApexes) {
  RunResult r;
  for (int i = 0; i < 8; ++i) {
    r.apexes.push_back({i, 0.5 * i, ApexState{0.45, i < 3 ? 0.5 : 1.0}, 1.0, 10.0 * i, 0.5 * i});
    r.touchdowns.push_back(0.5 * i + 0.2);
  }
  const auto w = steady_window(r, 2, 3, 0.1);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->first, 5u);
  EXPECT_EQ(w->last, 7u);
  EXPECT_DOUBLE_EQ(w->energy, 20.0);
  EXPECT_DOUBLE_EQ(w->frequency, 2.0);
  EXPECT_FALSE(steady_window(r, 3, 3, 0.1));
}

TEST(Simulation, EmptyProfileThrows) {
  RunSetup setup;
  RunOptions o;
  o.profile = {{0, 1.0}};
  EXPECT_THROW(run_closed_loop(setup, library(), o), std::invalid_argument);
}

TEST(Simulation, SeedsAreDeterministic) {
  RunSetup setup;
  RunOptions o;
  o.profile = {{2, 0.0}};
  o.seed = 4;
  const RunResult a = run_closed_loop(setup, library(), o);
  const RunResult b = run_closed_loop(setup, library(), o);
  EXPECT_EQ(a.energy, b.energy);
  o.seed = 5;
  const RunResult c = run_closed_loop(setup, library(), o);
  EXPECT_NE(a.energy, c.energy);
}

}  // namespace
}  // namespace hopper
