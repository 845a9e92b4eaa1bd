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

#include "hopper/motion_sketch.hpp"

#include <algorithm>
#include <cmath>

namespace hopper {
namespace {

constexpr double kTimeEps = 1e-12;

SlipState ballistic(const SlipState& s, double tau, double g) {
  SlipState out;
  out.p = s.p + tau * s.v + Vec2(0.0, -0.5 * g * tau * tau);
  out.v = s.v + Vec2(0.0, -g * tau);
  return out;
}

// Appends a node; at a repeated time the stance node wins so that event
// nodes carry contact = 1.
void push(MotionSketch& sk, double t, const SlipState& s, const Vec2& f, bool contact) {
  if (!sk.times.empty() && t <= sk.times.back() + kTimeEps) {
    if (sk.contact.back() && !contact) return;
    sk.times.back() = t;
    sk.com.back() = s;
    sk.grf.back() = f;
    sk.contact.back() = contact ? 1 : 0;
    return;
  }
  sk.times.push_back(t);
  sk.com.push_back(s);
  sk.grf.push_back(f);
  sk.contact.push_back(contact ? 1 : 0);
}

void push_ballistic(MotionSketch& sk, const SlipState& s0, double t0, double duration, double g,
                    double dt) {
  for (int k = 0; k * dt < duration - kTimeEps; ++k) {
    push(sk, t0 + k * dt, ballistic(s0, k * dt, g), Vec2::Zero(), false);
  }
}

struct Cursor {
  SlipState state;
  double t = 0.0;
};

// Flight from `c` to a touchdown at leg angle alpha. Leaves the cursor at
// touchdown and returns the foothold.
SlipFailure fly_to_touchdown(MotionSketch& sk, Cursor& c, double alpha, const SlipParams& p,
                             double dt, Vec2& foot) {
  const double z_td = touchdown_height(alpha, p);
  if (!(z_td > 0.0)) return SlipFailure::kGroundContact;
  const double z = c.state.p.y();
  const double vz = c.state.v.y();
  if (z < z_td - 1e-12 && vz <= 0.0) return SlipFailure::kInvalidApex;
  const double disc = vz * vz + 2.0 * p.g * (z - z_td);
  if (disc < 0.0) return SlipFailure::kInvalidApex;
  const double tau = (vz + std::sqrt(disc)) / p.g;
  if (vz >= 0.0) {
    const double t_apex = c.t + vz / p.g;
    if (sk.apex_times.empty() || t_apex > sk.apex_times.back() + 1e-9) {
      sk.apex_times.push_back(t_apex);
    }
  }
  push_ballistic(sk, c.state, c.t, tau, p.g, dt);
  c.state = ballistic(c.state, tau, p.g);
  c.t += tau;
  foot = Vec2(c.state.p.x() + p.r0 * std::sin(alpha), 0.0);
  return SlipFailure::kNone;
}

// Stance from `c` about `foot`, leaving the cursor at liftoff.
SlipFailure stance(MotionSketch& sk, Cursor& c, const Vec2& foot, const SlipParams& p,
                   double dt) {
  const StanceRollout roll = simulate_stance(c.state, foot, p);
  if (roll.failure != SlipFailure::kNone) return roll.failure;
  const SlipState& lo = roll.liftoff;
  // A reversed liftoff speed is left to the next apex correction.
  if (!(lo.v.y() > 0.0)) return SlipFailure::kNoApex;
  for (int k = 0; k * dt < roll.duration - kTimeEps; ++k) {
    const SlipState s = sample_stance(roll, foot, p, k * dt);
    push(sk, c.t + k * dt, s, slip_grf(s.p, foot, p), true);
  }
  push(sk, c.t + roll.duration, lo, slip_grf(lo.p, foot, p), true);
  sk.stances.push_back({c.t, c.t + roll.duration, foot});
  if (sk.stances.size() == 1) sk.touchdown_point = foot;
  c.state = lo;
  c.t += roll.duration;
  return SlipFailure::kNone;
}

// Rise from liftoff to the apex; the apex node has exactly zero vertical
// velocity.
void rise_to_apex(MotionSketch& sk, Cursor& c, const SlipParams& p, double dt) {
  const double tau = c.state.v.y() / p.g;
  push_ballistic(sk, c.state, c.t, tau, p.g, dt);
  c.state = ballistic(c.state, tau, p.g);
  c.state.v.y() = 0.0;
  c.t += tau;
  push(sk, c.t, c.state, Vec2::Zero(), false);
  sk.apex_times.push_back(c.t);
}

SlipFailure cycle(MotionSketch& sk, Cursor& c, double alpha, const SlipParams& p,
                  const SketchOptions& opts) {
  const double dt = opts.dt_sample;
  Vec2 foot;
  if (auto f = fly_to_touchdown(sk, c, alpha, p, dt, foot); f != SlipFailure::kNone) return f;
  if (opts.restore_height > 0.0) {
    c.state = restore_touchdown_energy(c.state, opts.restore_height, opts.restore_gain, p.g);
  }
  if (auto f = stance(sk, c, foot, p, dt); f != SlipFailure::kNone) return f;
  rise_to_apex(sk, c, p, dt);
  return SlipFailure::kNone;
}

SlipFailure extend_from(MotionSketch& sk, Cursor& c, double end_time, const AlphaPolicy& policy,
                        const SlipParams& p, const SketchOptions& opts) {
  for (int n = 0; n < opts.max_cycles && c.t < end_time; ++n) {
    const double alpha = policy(ApexState{c.state.p.y(), c.state.v.x()});
    if (auto f = cycle(sk, c, alpha, p, opts); f != SlipFailure::kNone) return f;
  }
  return SlipFailure::kNone;
}

SketchOutcome finish(MotionSketch&& sk, SlipFailure failure) {
  SketchOutcome out;
  out.failure = failure;
  if (failure == SlipFailure::kNone) out.sketch = std::move(sk);
  return out;
}

}  // namespace

SlipState restore_touchdown_energy(const SlipState& s, double height, double gain, double g) {
  const double vz = s.v.y();
  if (!(vz < 0.0)) return s;
  const double gap = g * (height - s.p.y()) - 0.5 * vz * vz;
  const double vz2 = vz * vz + 2.0 * gain * gap;
  if (!(vz2 > 0.0)) return s;
  SlipState out = s;
  out.v.y() = -std::sqrt(vz2);
  return out;
}

SketchSample MotionSketch::sample(double t) const {
  SketchSample s;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) {
    s.com = com.front();
  } else if (it == times.end()) {
    s.com = com.back();
  } else {
    const auto i = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[i - 1]) / (times[i] - times[i - 1]);
    s.com.p = (1.0 - w) * com[i - 1].p + w * com[i].p;
    s.com.v = (1.0 - w) * com[i - 1].v + w * com[i].v;
    if (contact[i - 1] && contact[i]) s.grf = (1.0 - w) * grf[i - 1] + w * grf[i];
  }
  if (const ContactWindow* w = stance_at(t)) {
    s.contact = true;
    s.foot = w->foot;
    if (it == times.begin()) s.grf = grf.front();
    if (it == times.end()) s.grf = grf.back();
  } else {
    s.grf.setZero();
    const auto next = std::find_if(stances.begin(), stances.end(),
                                   [&](const ContactWindow& c) { return c.touchdown >= t; });
    if (next != stances.end()) {
      s.foot = next->foot;
    } else if (!stances.empty()) {
      s.foot = stances.back().foot;
    }
  }
  return s;
}

const ContactWindow* MotionSketch::stance_at(double t) const {
  for (const ContactWindow& w : stances) {
    if (t >= w.touchdown && t <= w.liftoff) return &w;
  }
  return nullptr;
}

std::vector<double> MotionSketch::events_between(double t0, double t1) const {
  std::vector<double> ev;
  for (const ContactWindow& w : stances) {
    if (w.touchdown > t0 && w.touchdown < t1) ev.push_back(w.touchdown);
    if (w.liftoff > t0 && w.liftoff < t1) ev.push_back(w.liftoff);
  }
  std::sort(ev.begin(), ev.end());
  return ev;
}

AlphaPolicy deadbeat_policy(const GaitTuple& tuple) {
  return [tuple](const ApexState& apex) { return deadbeat_alpha(tuple, apex); };
}

SketchOutcome generate_motion_sketch(const ApexState& apex, const GaitTuple& tuple,
                                     const SlipParams& params, double dt_sample) {
  SlipState start;
  start.p = Vec2(0.0, apex.height);
  start.v = Vec2(apex.velocity, 0.0);
  SketchOptions opts;
  opts.dt_sample = dt_sample;
  return sketch_from_flight(start, 0.0, deadbeat_alpha(tuple, apex), deadbeat_policy(tuple),
                            params, opts);
}

SketchOutcome sketch_from_flight(const SlipState& now, double t_now, double alpha_next,
                                 const AlphaPolicy& policy, const SlipParams& params,
                                 const SketchOptions& options) {
  if (!(options.dt_sample > 0.0)) throw SchemaError("sketch: dt_sample must be positive");
  MotionSketch sk;
  Cursor c{now, t_now};
  if (auto f = cycle(sk, c, alpha_next, params, options); f != SlipFailure::kNone) {
    return finish(std::move(sk), f);
  }
  const SlipFailure f = extend_from(sk, c, t_now + options.min_duration, policy, params, options);
  return finish(std::move(sk), f);
}

SketchOutcome sketch_from_stance(const SlipState& now, const Vec2& foot, double t_now,
                                 const AlphaPolicy& policy, const SlipParams& params,
                                 const SketchOptions& options) {
  if (!(options.dt_sample > 0.0)) throw SchemaError("sketch: dt_sample must be positive");
  MotionSketch sk;
  Cursor c{now, t_now};
  if (auto f = stance(sk, c, foot, params, options.dt_sample); f != SlipFailure::kNone) {
    return finish(std::move(sk), f);
  }
  rise_to_apex(sk, c, params, options.dt_sample);
  const SlipFailure f = extend_from(sk, c, t_now + options.min_duration, policy, params, options);
  return finish(std::move(sk), f);
}

SlipFailure extend_sketch(MotionSketch& sketch, double end_time, const AlphaPolicy& policy,
                          const SlipParams& params, const SketchOptions& options) {
  if (sketch.empty()) throw SchemaError("sketch: cannot extend an empty sketch");
  Cursor c{sketch.com.back(), sketch.end_time()};
  return extend_from(sketch, c, end_time, policy, params, options);
}

}  // namespace hopper
