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

#include <algorithm>
#include <cmath>

namespace hopper {
namespace {

constexpr double kBoundarySlack = 1e-9;

// Joint angles for a hip-to-foot vector d (torso frame) of admissible length.
Vec2 solve_chain(const LegGeometry& leg, const Vec2& d) {
  const double l1 = leg.thigh_length;
  const double l2 = leg.shank_length;
  const double L2 = d.squaredNorm();
  const double c = std::clamp((L2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0);
  const double knee = -std::acos(c);
  const double psi = std::atan2(d.x(), -d.y());
  const double hip = psi - std::atan2(l2 * std::sin(knee), l1 + l2 * std::cos(knee));
  return Vec2(hip, knee);
}

Vec2 hip_to_foot(const LegGeometry& leg, const Vec2& com, double pitch,
                 const Vec2& foot) {
  return rotation(-pitch) * (foot - com) - leg.hip_offset_body;
}

}  // namespace

Vec2 inverse_kinematics(const LegGeometry& leg, const Vec2& com, double pitch,
                        const Vec2& foot) {
  Vec2 d = hip_to_foot(leg, com, pitch, foot);
  const double L = d.norm();
  const double reach = leg.max_reach();
  if (L > reach) {
    if (L > reach + kBoundarySlack) throw OutOfWorkspace(L, reach);
    d *= reach / L;
  }
  if (L < leg.min_reach()) {
    if (L < leg.min_reach() - kBoundarySlack || L == 0.0) throw OutOfWorkspace(L, reach);
    d *= leg.min_reach() / L;
  }
  return solve_chain(leg, d);
}

IkResult inverse_kinematics_clamped(const LegGeometry& leg, const Vec2& com,
                                    double pitch, const Vec2& foot) {
  Vec2 d = hip_to_foot(leg, com, pitch, foot);
  const double L = d.norm();
  IkResult out;
  if (L > leg.max_reach()) {
    d *= leg.max_reach() / L;
    out.clamped = true;
  } else if (L < leg.min_reach()) {
    d = L > 0.0 ? Vec2(d * (leg.min_reach() / L)) : Vec2(0.0, -leg.min_reach());
    out.clamped = true;
  }
  out.q = solve_chain(leg, d);
  return out;
}

void validate_geometry(const LegGeometry& leg, double rest_length) {
  if (!(leg.thigh_length > 0.0) || !(leg.shank_length > 0.0)) {
    throw SchemaError("leg: link lengths must be positive");
  }
  if (leg.max_reach() < rest_length) {
    throw SchemaError("leg: reach " + std::to_string(leg.max_reach()) +
                      " m is shorter than the template rest length " +
                      std::to_string(rest_length) + " m");
  }
}

}  // namespace hopper
