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

#ifndef HOPPER_MOTION_SKETCH_HPP_
#define HOPPER_MOTION_SKETCH_HPP_

// Time-indexed SLIP reference for the MPC layers: CoM trajectory, ground
// reaction force, footholds and the contact schedule. Times are absolute
// simulation times; sampling is piecewise linear between stored nodes, and
// event times (touchdown, liftoff) are always stored nodes.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "hopper/gait_library.hpp"
#include "hopper/slip.hpp"

namespace hopper {

struct ContactWindow {
  double touchdown = 0.0;  // [s]
  double liftoff = 0.0;    // [s]
  Vec2 foot = Vec2::Zero();
};

struct SketchSample {
  SlipState com;
  Vec2 grf = Vec2::Zero();
  Vec2 foot = Vec2::Zero();  // active foothold in stance, next foothold in flight
  bool contact = false;
};

struct MotionSketch {
  std::vector<double> times;
  std::vector<SlipState> com;
  std::vector<Vec2> grf;
  std::vector<std::uint8_t> contact;
  Vec2 touchdown_point = Vec2::Zero();  // first foothold of the sketch
  std::vector<ContactWindow> stances;
  std::vector<double> apex_times;

  double start_time() const { return times.front(); }
  double end_time() const { return times.back(); }
  bool empty() const { return times.empty(); }

  /// Linear interpolation; clamps to the ends. Contact is decided by the
  /// stance windows so that event nodes are never blurred.
  SketchSample sample(double t) const;

  /// Stance window containing t, if any.
  const ContactWindow* stance_at(double t) const;

  /// Touchdown and liftoff times strictly inside (t0, t1), sorted.
  std::vector<double> events_between(double t0, double t1) const;
};

struct SketchOutcome {
  std::optional<MotionSketch> sketch;
  SlipFailure failure = SlipFailure::kNone;

  explicit operator bool() const { return sketch.has_value(); }
};

/// Touchdown angle chosen at each predicted apex.
using AlphaPolicy = std::function<double(const ApexState&)>;

/// Deadbeat policy around one library tuple.
AlphaPolicy deadbeat_policy(const GaitTuple& tuple);

struct SketchOptions {
  double dt_sample = 0.005;   // [s]
  double min_duration = 0.0;  // keep appending cycles until this long
  int max_cycles = 8;
  double restore_height = 0.0;  // > 0: touchdowns are rescaled toward this apex height
  double restore_gain = 1.0;
};

/// Touchdown state with the vertical speed rescaled so that a share `gain`
/// of the gap between the vertical energy and an apex at `height` is closed.
/// Returned unchanged when not descending or when no real speed exists.
SlipState restore_touchdown_energy(const SlipState& s, double height, double gain, double g);

/// One apex-to-apex cycle starting at an apex at x = 0, t = 0, with the
/// touchdown angle from the deadbeat law at the measured apex.
SketchOutcome generate_motion_sketch(const ApexState& apex, const GaitTuple& tuple,
                                     const SlipParams& params, double dt_sample);

/// Sketch from a flight state: ballistic fall to a touchdown at leg angle
/// alpha_next, stance, rise to apex, then policy cycles until the sketch
/// covers min_duration and ends at an apex.
SketchOutcome sketch_from_flight(const SlipState& now, double t_now, double alpha_next,
                                 const AlphaPolicy& policy, const SlipParams& params,
                                 const SketchOptions& options = {});

/// Sketch from a stance state with the actual foothold (touchdown reset).
SketchOutcome sketch_from_stance(const SlipState& now, const Vec2& foot, double t_now,
                                 const AlphaPolicy& policy, const SlipParams& params,
                                 const SketchOptions& options = {});

/// Appends policy cycles to a sketch that ends at an apex until it reaches
/// end_time. Returns the failure that stopped it, kNone on success.
SlipFailure extend_sketch(MotionSketch& sketch, double end_time, const AlphaPolicy& policy,
                          const SlipParams& params, const SketchOptions& options = {});

}  // namespace hopper

#endif  // HOPPER_MOTION_SKETCH_HPP_
