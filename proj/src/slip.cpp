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

#include "hopper/slip.hpp"

#include <algorithm>
#include <cmath>

namespace hopper {
namespace {

struct Derivative {
  Vec2 dp;
  Vec2 dv;
};

Derivative stance_rhs(const SlipState& s, const Vec2& foot, const SlipParams& params) {
  return {s.v, slip_grf(s.p, foot, params) / params.mass + Vec2(0.0, -params.g)};
}

SlipState rk4(const SlipState& s, const Vec2& foot, const SlipParams& params, double h) {
  const Derivative k1 = stance_rhs(s, foot, params);
  const SlipState s2{s.p + 0.5 * h * k1.dp, s.v + 0.5 * h * k1.dv};
  const Derivative k2 = stance_rhs(s2, foot, params);
  const SlipState s3{s.p + 0.5 * h * k2.dp, s.v + 0.5 * h * k2.dv};
  const Derivative k3 = stance_rhs(s3, foot, params);
  const SlipState s4{s.p + h * k3.dp, s.v + h * k3.dv};
  const Derivative k4 = stance_rhs(s4, foot, params);
  return {s.p + h / 6.0 * (k1.dp + 2.0 * k2.dp + 2.0 * k3.dp + k4.dp),
          s.v + h / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv)};
}

double leg_length(const SlipState& s, const Vec2& foot) { return (foot - s.p).norm(); }

}  // namespace

void SlipParams::validate() const {
  if (!(mass > 0.0) || !(k_s > 0.0) || !(r0 > 0.0) || !(g > 0.0)) {
    throw SchemaError("slip: mass, k_s, r0 and g must be strictly positive");
  }
}

std::string_view to_string(SlipFailure failure) {
  switch (failure) {
    case SlipFailure::kNone: return "none";
    case SlipFailure::kGroundContact: return "ground_contact";
    case SlipFailure::kInvalidApex: return "invalid_apex";
    case SlipFailure::kNoLiftoff: return "no_liftoff";
    case SlipFailure::kBackwardFall: return "backward_fall";
    case SlipFailure::kNoApex: return "no_apex";
  }
  return "unknown";
}

bool falls_backward(double vx_touchdown, double vx_liftoff) {
  // A hop that only nudges the velocity through zero is still a valid hop.
  return vx_liftoff * vx_touchdown < 0.0 && std::abs(vx_liftoff) >= 0.5 * std::abs(vx_touchdown) &&
         std::abs(vx_liftoff) > 0.1;
}

Vec2 slip_grf(const Vec2& p, const Vec2& foot, const SlipParams& params) {
  const Vec2 r = foot - p;
  const double len = r.norm();
  return params.k_s * (len - params.r0) * (r / len);
}

double slip_energy(const SlipState& s, const Vec2& foot, const SlipParams& params) {
  const double stretch = leg_length(s, foot) - params.r0;
  return 0.5 * params.mass * s.v.squaredNorm() + params.mass * params.g * s.p.y() +
         0.5 * params.k_s * stretch * stretch;
}

StanceStep integrate_stance(const SlipState& state, const Vec2& foot,
                            const SlipParams& params, double dt) {
  StanceStep out;
  out.next = rk4(state, foot, params, dt);
  out.grf = slip_grf(out.next.p, foot, params);
  out.extended = leg_length(out.next, foot) > params.r0;
  return out;
}

StanceRollout simulate_stance(const SlipState& start, const Vec2& foot,
                              const SlipParams& params, const SlipIntegration& opts) {
  StanceRollout out;
  out.nodes.push_back({0.0, start, true});
  SlipState s = start;
  const auto max_steps = static_cast<long>(std::ceil(opts.max_stance_time / opts.dt));
  for (long k = 0; k < max_steps; ++k) {
    const SlipState next = rk4(s, foot, params, opts.dt);
    if (next.p.y() <= 0.0) {
      out.failure = SlipFailure::kGroundContact;
      return out;
    }
    // The first step may start exactly at rest length; require the leg to be
    // moving outward before accepting an extension as liftoff.
    const bool outward = (next.p - foot).dot(next.v) > 0.0;
    if (leg_length(next, foot) >= params.r0 && outward) {
      double lo = 0.0;
      double hi = opts.dt;
      while (hi - lo > opts.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (leg_length(rk4(s, foot, params, mid), foot) >= params.r0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      out.liftoff = rk4(s, foot, params, hi);
      out.duration = static_cast<double>(k) * opts.dt + hi;
      out.nodes.push_back({out.duration, out.liftoff, true});
      return out;
    }
    s = next;
    out.nodes.push_back({static_cast<double>(k + 1) * opts.dt, s, true});
  }
  out.failure = SlipFailure::kNoLiftoff;
  return out;
}

SlipState sample_stance(const StanceRollout& rollout, const Vec2& foot,
                        const SlipParams& params, double t) {
  const auto& nodes = rollout.nodes;
  if (t <= 0.0) return nodes.front().state;
  if (t >= nodes.back().t) return nodes.back().state;
  // Grid nodes are uniform except the final liftoff node.
  const double dt = nodes.size() > 2 ? nodes[1].t - nodes[0].t : nodes.back().t;
  auto idx = static_cast<std::size_t>(t / dt);
  idx = std::min(idx, nodes.size() - 2);
  while (idx > 0 && nodes[idx].t > t) --idx;
  const double h = t - nodes[idx].t;
  if (h == 0.0) return nodes[idx].state;
  return rk4(nodes[idx].state, foot, params, h);
}

ReturnMapOutcome apex_return_map(const ApexState& apex, double alpha,
                                 const SlipParams& params, const SlipIntegration& opts) {
  ReturnMapOutcome out;
  const double z_td = touchdown_height(alpha, params);
  if (!(z_td > 0.0)) {
    out.failure = SlipFailure::kGroundContact;
    return out;
  }
  if (!(apex.height > z_td)) {
    out.failure = SlipFailure::kInvalidApex;
    return out;
  }
  out.fall_time = std::sqrt(2.0 * (apex.height - z_td) / params.g);
  SlipState td;
  td.p = Vec2(apex.velocity * out.fall_time, z_td);
  td.v = Vec2(apex.velocity, -params.g * out.fall_time);
  const Vec2 foot(td.p.x() + params.r0 * std::sin(alpha), 0.0);

  const StanceRollout stance = simulate_stance(td, foot, params, opts);
  if (stance.failure != SlipFailure::kNone) {
    out.failure = stance.failure;
    return out;
  }
  out.stance_time = stance.duration;
  const SlipState& lo = stance.liftoff;
  if (falls_backward(apex.velocity, lo.v.x())) {
    out.failure = SlipFailure::kBackwardFall;
    return out;
  }
  if (!(lo.v.y() > 0.0)) {
    out.failure = SlipFailure::kNoApex;
    return out;
  }
  out.rise_time = lo.v.y() / params.g;
  out.dx = lo.p.x() + lo.v.x() * out.rise_time;
  out.apex = ApexState{lo.p.y() + 0.5 * lo.v.y() * lo.v.y() / params.g, lo.v.x()};
  return out;
}

}  // namespace hopper
