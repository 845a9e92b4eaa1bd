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

#ifndef HOPPER_HORIZON_HPP_
#define HOPPER_HORIZON_HPP_

// Prediction horizon shared by both MPC layers: event-aligned time steps and
// the per-step reference sampled from the motion sketch.

#include <cstdint>
#include <vector>

#include "hopper/motion_sketch.hpp"
#include "hopper/types.hpp"

namespace hopper {

struct HorizonStep {
  double dt = 0.0;
  bool contact = false;
};

/// Splits N * nominal_dt into N steps whose boundaries contain every event
/// exactly. `events` are offsets from the horizon start, sorted, inside
/// (0, N * nominal_dt). The contact flag starts at `contact_at_start` and
/// toggles at every event. Each event moves the nearest free uniform
/// boundary onto it; other boundaries stay on the uniform grid.
std::vector<HorizonStep> segment_timesteps(double nominal_dt, const std::vector<double>& events,
                                           bool contact_at_start, int N);

/// Reference along the horizon. x_ref has N+1 entries (k = 0..N), forces and
/// footholds N entries. Rotational references are zero.
struct HorizonReference {
  double t0 = 0.0;
  Vec6 x0 = Vec6::Zero();
  std::vector<HorizonStep> steps;
  std::vector<Vec6> x_ref;
  std::vector<Vec2> f_ref;
  std::vector<Vec2> foot;

  int N() const { return static_cast<int>(steps.size()); }
  double node_time(int k) const;
  int stance_steps() const;
};

/// Samples the sketch on the event-aligned grid starting at t0. f_ref is the
/// mean sketch force over each step, which keeps the reference impulse
/// consistent with the template.
HorizonReference make_reference(const MotionSketch& sketch, double t0, const Vec6& x0,
                                double span, int N);

}  // namespace hopper

#endif  // HOPPER_HORIZON_HPP_
