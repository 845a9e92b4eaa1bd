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

#include "hopper/swing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hopper {
namespace {

constexpr double kBinomial6[7] = {1, 6, 15, 20, 15, 6, 1};

}  // namespace

Vec2 SwingCurve::at(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  Vec2 p = Vec2::Zero();
  for (int i = 0; i <= 6; ++i) {
    p += kBinomial6[i] * std::pow(s, i) * std::pow(1.0 - s, 6 - i) * points[i];
  }
  return p;
}

Vec2 SwingCurve::derivative(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  constexpr double kBinomial5[6] = {1, 5, 10, 10, 5, 1};
  Vec2 d = Vec2::Zero();
  for (int i = 0; i <= 5; ++i) {
    d += 6.0 * kBinomial5[i] * std::pow(s, i) * std::pow(1.0 - s, 5 - i) *
         (points[i + 1] - points[i]);
  }
  return d;
}

SwingCurve swing_trajectory(const Vec2& liftoff, const Vec2& touchdown, double start_time,
                            double duration, double clearance) {
  if (!(duration > 0.0)) throw std::invalid_argument("swing duration must be positive");
  SwingCurve c;
  c.start_time = start_time;
  c.duration = duration;
  const double top = std::max(liftoff.y(), touchdown.y()) + clearance * 64.0 / 50.0;
  const double mid_x = 0.5 * (liftoff.x() + touchdown.x());
  c.points[0] = liftoff;
  c.points[1] = liftoff;
  c.points[2] = Vec2(liftoff.x(), top);
  c.points[3] = Vec2(mid_x, top);
  c.points[4] = Vec2(touchdown.x(), top);
  c.points[5] = touchdown;
  c.points[6] = touchdown;
  return c;
}

void PdGains::validate() const {
  if (!(kp.array() > 0.0).all() || !(kd.array() > 0.0).all()) {
    throw SchemaError("pd gains must be positive");
  }
}

Vec2 swing_pd(const Vec2& q_des, const Vec2& q, const Vec2& qdot, const PdGains& gains) {
  return gains.kp.cwiseProduct(q_des - q) - gains.kd.cwiseProduct(qdot);
}

}  // namespace hopper
