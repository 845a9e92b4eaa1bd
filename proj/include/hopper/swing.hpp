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

#ifndef HOPPER_SWING_HPP_
#define HOPPER_SWING_HPP_

// Swing-leg reference: a degree-6 Bezier between the liftoff and touchdown
// foot positions with the three middle control points raised, tracked by a
// joint-space PD loop.

#include <array>

#include "hopper/types.hpp"

namespace hopper {

struct SwingCurve {
  std::array<Vec2, 7> points;
  double start_time = 0.0;
  double duration = 1.0;

  /// Position at normalized time s, clamped to [0, 1].
  Vec2 at(double s) const;
  /// Position at absolute time t.
  Vec2 at_time(double t) const { return at((t - start_time) / duration); }
  /// d/ds of the curve.
  Vec2 derivative(double s) const;
};

/// Endpoints pinned; both end velocities have zero x component. The middle
/// points sit 64/50 clearance above the higher endpoint so that a level
/// swing peaks exactly `clearance` above it.
SwingCurve swing_trajectory(const Vec2& liftoff, const Vec2& touchdown, double start_time,
                            double duration, double clearance);

struct PdGains {
  Vec2 kp{40.0, 40.0};
  Vec2 kd{0.5, 0.5};

  void validate() const;
};

/// tau = Kp (q_des - q) - Kd qdot.
Vec2 swing_pd(const Vec2& q_des, const Vec2& q, const Vec2& qdot, const PdGains& gains);

}  // namespace hopper

#endif  // HOPPER_SWING_HPP_
