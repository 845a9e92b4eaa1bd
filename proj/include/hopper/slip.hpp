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

#ifndef HOPPER_SLIP_HPP_
#define HOPPER_SLIP_HPP_

// Spring-loaded inverted pendulum template: stance integration and the
// apex-to-apex return map.
//
// Flight phases are ballistic and evaluated in closed form. Stance is
// integrated with fixed-step RK4 on a grid anchored at touchdown; liftoff is
// located by bisection on the final partial step. The touchdown angle alpha
// is measured from the world vertical, positive forward.

#include <optional>
#include <string_view>
#include <vector>

#include "hopper/types.hpp"

namespace hopper {

struct SlipParams {
  double mass = 2.5;
  double k_s = 1500.0;
  double r0 = 0.32;
  double g = 9.81;

  void validate() const;
};

struct ApexState {
  double height = 0.0;    // p_cz [m]
  double velocity = 0.0;  // v_cx [m/s]
};

struct SlipState {
  Vec2 p = Vec2::Zero();
  Vec2 v = Vec2::Zero();
};

struct StanceStep {
  SlipState next;
  Vec2 grf = Vec2::Zero();  // at `next`
  bool extended = false;    // leg longer than r0 at `next`: liftoff event
};

struct SlipIntegration {
  double dt = 1e-4;
  double event_tolerance = 1e-10;  // [s]
  double max_stance_time = 2.0;
};

enum class SlipFailure {
  kNone,
  kGroundContact,     // mass reaches the ground or touchdown height <= 0
  kInvalidApex,       // apex below the touchdown height
  kNoLiftoff,
  kBackwardFall,      // bounced back: see falls_backward()
  kNoApex,            // liftoff without upward velocity
};

std::string_view to_string(SlipFailure failure);

/// Liftoff speed reversed against the touchdown speed, by at least half of
/// it and by more than 0.1 m/s.
bool falls_backward(double vx_touchdown, double vx_liftoff);

/// Mechanical force on the mass from the leg spring (the ground reaction
/// force): k_s (|r| - r0) r_hat with r = foot - p, pointing away from the
/// foot under compression.
Vec2 slip_grf(const Vec2& p, const Vec2& foot, const SlipParams& params);

/// Total mechanical energy in stance (spring + kinetic + potential).
double slip_energy(const SlipState& s, const Vec2& foot, const SlipParams& params);

/// One RK4 stance step of size dt.
StanceStep integrate_stance(const SlipState& state, const Vec2& foot,
                            const SlipParams& params, double dt);

/// One node of a densely recorded SLIP rollout.
struct SlipNode {
  double t = 0.0;
  SlipState state;
  bool stance = false;
};

/// Stance phase from touchdown (or any compressed state) to liftoff.
struct StanceRollout {
  std::vector<SlipNode> nodes;  // RK4 grid plus the exact liftoff node
  SlipState liftoff;
  double duration = 0.0;
  SlipFailure failure = SlipFailure::kNone;
};

StanceRollout simulate_stance(const SlipState& start, const Vec2& foot,
                              const SlipParams& params,
                              const SlipIntegration& opts = {});

/// Interpolates a stance rollout at time t (relative to its start) by a
/// partial RK4 step from the preceding grid node.
SlipState sample_stance(const StanceRollout& rollout, const Vec2& foot,
                        const SlipParams& params, double t);

struct ReturnMapOutcome {
  std::optional<ApexState> apex;
  SlipFailure failure = SlipFailure::kNone;
  double fall_time = 0.0;     // apex to touchdown
  double stance_time = 0.0;
  double rise_time = 0.0;     // liftoff to next apex
  double dx = 0.0;            // horizontal travel apex to apex

  explicit operator bool() const { return apex.has_value(); }
  double period() const { return fall_time + stance_time + rise_time; }
};

/// Apex-to-apex map h(apex, alpha). Deterministic.
ReturnMapOutcome apex_return_map(const ApexState& apex, double alpha,
                                 const SlipParams& params,
                                 const SlipIntegration& opts = {});

/// Touchdown height of a leg at rest length and angle alpha.
inline double touchdown_height(double alpha, const SlipParams& params) {
  return params.r0 * std::cos(alpha);
}

}  // namespace hopper

#endif  // HOPPER_SLIP_HPP_
