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

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "hopper/gait_library.hpp"
#include "hopper/horizon.hpp"
#include "hopper/motion_sketch.hpp"

namespace hopper {
namespace {

const GaitLibrary& library() {
  static const GaitLibrary lib = GaitLibrary::build(SlipParams{});
  return lib;
}

// Independent boundary placement: every order-preserving assignment of events
// to interior uniform boundaries, keeping the one with least total shift.
std::vector<double> brute_force_boundaries(double dt, const std::vector<double>& events, int N) {
  const int m = static_cast<int>(events.size());
  std::vector<int> best, cur;
  double best_cost = std::numeric_limits<double>::infinity();
  std::function<void(int, int, double)> rec = [&](int i, int from, double cost) {
    if (i == m) {
      if (cost < best_cost) {
        best_cost = cost;
        best = cur;
      }
      return;
    }
    for (int j = from; j <= N - 1 - (m - 1 - i); ++j) {
      cur.push_back(j);
      rec(i + 1, j + 1, cost + std::abs(j * dt - events[i]));
      cur.pop_back();
    }
  };
  rec(0, 1, 0.0);
  std::vector<double> b(N + 1);
  for (int j = 0; j <= N; ++j) b[j] = j * dt;
  for (int i = 0; i < m; ++i) b[best[i]] = events[i];
  return b;
}

std::vector<double> boundaries(const std::vector<HorizonStep>& steps) {
  std::vector<double> b{0.0};
  for (const HorizonStep& s : steps) b.push_back(b.back() + s.dt);
  return b;
}

TEST(Segmentation, NoEventsGivesUniformGrid) {
  const auto steps = segment_timesteps(0.045, {}, true, 10);
  ASSERT_EQ(steps.size(), 10u);
  for (const HorizonStep& s : steps) {
    EXPECT_NEAR(s.dt, 0.045, 1e-15);
    EXPECT_TRUE(s.contact);
  }
}

TEST(Segmentation, SingleEventLandsOnABoundary) {
  const double dt = 0.045, span = 10 * dt, e = 0.37 * span;
  const auto steps = segment_timesteps(dt, {e}, false, 10);
  const auto b = boundaries(steps);
  const auto oracle = brute_force_boundaries(dt, {e}, 10);
  bool hit = false;
  for (int j = 0; j <= 10; ++j) {
    EXPECT_NEAR(b[j], oracle[j], 1e-12);
    hit |= b[j] == e || std::abs(b[j] - e) < 1e-15;
  }
  EXPECT_TRUE(hit);
  for (const HorizonStep& s : steps) EXPECT_GT(s.dt, 0.0);
  EXPECT_NEAR(b.back(), span, 1e-12);
}

TEST(Segmentation, EventOnUniformBoundaryKeepsGrid) {
  const auto steps = segment_timesteps(0.05, {0.15}, true, 10);
  for (const HorizonStep& s : steps) EXPECT_NEAR(s.dt, 0.05, 1e-15);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(steps[k].contact, k < 3);
}

TEST(Segmentation, RandomSchedulesMatchBruteForce) {
  std::mt19937 rng(7);
  const int N = 10;
  const double dt = 0.045, span = N * dt;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = 1 + static_cast<int>(rng() % 3);
    std::vector<double> events;
    // Events at least 1.5 steps apart and away from the ends.
    std::uniform_real_distribution<double> u(0.6 * dt, span - 0.6 * dt);
    while (static_cast<int>(events.size()) < m) {
      const double e = u(rng);
      bool ok = true;
      for (double x : events) ok &= std::abs(x - e) > 1.5 * dt;
      if (ok) events.push_back(e);
    }
    std::sort(events.begin(), events.end());
    const auto steps = segment_timesteps(dt, events, true, N);
    const auto b = boundaries(steps);
    const auto oracle = brute_force_boundaries(dt, events, N);
    for (int j = 0; j <= N; ++j) ASSERT_NEAR(b[j], oracle[j], 1e-12) << trial;
    EXPECT_NEAR(b.back(), span, 1e-12);
    for (int k = 0; k < N; ++k) {
      const bool adjacent = std::any_of(events.begin(), events.end(), [&](double e) {
        return std::abs(b[k] - e) < 1e-12 || std::abs(b[k + 1] - e) < 1e-12;
      });
      if (!adjacent) EXPECT_NEAR(steps[k].dt, dt, 1e-12);
      EXPECT_GT(steps[k].dt, 0.0);
    }
    // Contact toggles exactly at the events.
    int toggles = 0;
    for (int k = 1; k < N; ++k) toggles += steps[k].contact != steps[k - 1].contact;
    EXPECT_EQ(toggles, m);
  }
}

TEST(Segmentation, TooManyEventsThrows) {
  std::vector<double> events;
  for (int i = 1; i <= 4; ++i) events.push_back(0.1 * i - 0.01);
  EXPECT_THROW(segment_timesteps(0.1, events, true, 4), std::invalid_argument);
}

TEST(ReturnMap, VerticalFixedPointAtZeroSpeed) {
  const GaitEntry e = library().entries()[30];
  EXPECT_DOUBLE_EQ(e.speed, 0.0);
  EXPECT_NEAR(e.alpha, 0.0, 1e-9);
}

TEST(ReturnMap, LegForwardSlowsTheNextApex) {
  const SlipParams p;
  const ApexState apex{0.45, 1.0};
  double prev = std::numeric_limits<double>::infinity();
  // Beyond about 0.36 rad the template falls backward.
  for (double alpha = 0.0; alpha <= 0.35; alpha += 0.025) {
    const auto out = apex_return_map(apex, alpha, p);
    ASSERT_TRUE(out) << alpha;
    EXPECT_LT(out.apex->velocity, prev) << alpha;
    prev = out.apex->velocity;
  }
}

TEST(GaitLibrary, TouchdownAngleMonotoneInSpeed) {
  const auto& e = library().entries();
  for (std::size_t i = 1; i < e.size(); ++i) EXPECT_GT(e[i].alpha, e[i - 1].alpha) << e[i].speed;
}

TEST(GaitLibrary, BuildTime) {
  const auto t0 = std::chrono::steady_clock::now();
  const GaitLibrary lib = GaitLibrary::build(SlipParams{});
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(lib.entries().size(), 61u);
  EXPECT_LT(s, 10.0);
}

TEST(GaitLibrary, ZeroErrorGivesNominalAngle) {
  const GaitTuple t = library().query(1.3);
  EXPECT_EQ(deadbeat_alpha(t, t.apex), t.alpha);
}

class SketchAtFixedPoint : public ::testing::TestWithParam<double> {};

TEST_P(SketchAtFixedPoint, ImpulseBalancesGravity) {
  const SlipParams p;
  const GaitTuple t = library().query(GetParam());
  const auto out = generate_motion_sketch(t.apex, t, p, 0.001);
  ASSERT_TRUE(out);
  const MotionSketch& s = *out.sketch;
  ASSERT_GE(s.apex_times.size(), 2u);
  const double t0 = s.apex_times[0], t1 = s.apex_times[1];
  double impulse = 0.0;
  for (std::size_t i = 1; i < s.times.size(); ++i) {
    if (s.times[i] <= t0 || s.times[i - 1] >= t1) continue;
    impulse += 0.5 * (s.grf[i].y() + s.grf[i - 1].y()) * (s.times[i] - s.times[i - 1]);
  }
  const double expected = p.mass * p.g * (t1 - t0);
  EXPECT_NEAR(impulse, expected, 0.02 * expected);
}

TEST_P(SketchAtFixedPoint, ContactMatchesForceSupport) {
  const GaitTuple t = library().query(GetParam());
  const auto out = generate_motion_sketch(t.apex, t, SlipParams{}, 0.002);
  ASSERT_TRUE(out);
  const MotionSketch& s = *out.sketch;
  for (std::size_t i = 0; i < s.times.size(); ++i) {
    if (!s.contact[i]) {
      EXPECT_EQ(s.grf[i], Vec2::Zero()) << s.times[i];
    } else {
      EXPECT_NE(s.stance_at(s.times[i]), nullptr);
    }
  }
  for (const ContactWindow& w : s.stances) {
    const double mid = 0.5 * (w.touchdown + w.liftoff);
    EXPECT_GT(s.sample(mid).grf.y(), 0.0);
    EXPECT_TRUE(s.sample(mid).contact);
  }
}

TEST_P(SketchAtFixedPoint, ApexStatesRepeat) {
  const SlipParams p;
  const GaitTuple t = library().query(GetParam());
  const auto out = generate_motion_sketch(t.apex, t, p, 0.001);
  ASSERT_TRUE(out);
  const MotionSketch& s = *out.sketch;
  ASSERT_GE(s.apex_times.size(), 2u);
  const SketchSample a = s.sample(s.apex_times.front());
  const SketchSample b = s.sample(s.apex_times.back());
  EXPECT_NEAR(a.com.p.y(), b.com.p.y(), 1e-5);
  EXPECT_NEAR(a.com.v.x(), b.com.v.x(), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Speeds, SketchAtFixedPoint, ::testing::Values(0.0, 0.5, 1.0, 2.0));

TEST(Reference, StepsAlignWithSketchEvents) {
  const GaitTuple t = library().query(1.0);
  const auto out = generate_motion_sketch(t.apex, t, SlipParams{}, 0.005);
  ASSERT_TRUE(out);
  const MotionSketch& s = *out.sketch;
  const double t0 = s.start_time() + 0.01;
  const HorizonReference ref = make_reference(s, t0, Vec6::Zero(), 0.45, 10);
  ASSERT_EQ(ref.N(), 10);
  for (double e : s.events_between(t0, t0 + 0.45)) {
    bool on_node = false;
    for (int k = 0; k <= 10; ++k) on_node |= std::abs(ref.node_time(k) - e) < 1e-12;
    EXPECT_TRUE(on_node) << e;
  }
  for (int k = 0; k < 10; ++k) {
    const double mid = ref.node_time(k) + 0.5 * ref.steps[k].dt;
    EXPECT_EQ(ref.steps[k].contact, s.stance_at(mid) != nullptr) << k;
    if (!ref.steps[k].contact) EXPECT_EQ(ref.f_ref[k], Vec2::Zero());
  }
}

}  // namespace
}  // namespace hopper
