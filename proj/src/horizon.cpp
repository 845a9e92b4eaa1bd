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

#include "hopper/horizon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hopper {

std::vector<HorizonStep> segment_timesteps(double nominal_dt, const std::vector<double>& events,
                                           bool contact_at_start, int N) {
  if (!(nominal_dt > 0.0) || N <= 0) throw std::invalid_argument("segment: need dt > 0, N > 0");
  const int n_ev = static_cast<int>(events.size());
  if (n_ev > N - 1) throw std::invalid_argument("segment: more events than interior boundaries");
  const double span = N * nominal_dt;
  std::vector<double> b(static_cast<std::size_t>(N) + 1);
  for (int j = 0; j <= N; ++j) b[j] = j * nominal_dt;
  b[N] = span;

  int prev = 0;
  for (int i = 0; i < n_ev; ++i) {
    const double e = events[i];
    if (!(e > 0.0 && e < span) || (i > 0 && !(e > events[i - 1]))) {
      throw std::invalid_argument("segment: events must be sorted and inside the horizon");
    }
    const int remaining = n_ev - 1 - i;
    int j = static_cast<int>(std::lround(e / nominal_dt));
    j = std::clamp(j, prev + 1, N - 1 - remaining);
    b[j] = e;
    prev = j;
  }
  for (int j = 0; j < N; ++j) {
    if (!(b[j + 1] > b[j])) throw std::logic_error("segment: non-monotone boundaries");
  }

  std::vector<HorizonStep> steps(static_cast<std::size_t>(N));
  bool contact = contact_at_start;
  std::size_t next_event = 0;
  for (int k = 0; k < N; ++k) {
    if (next_event < events.size() && b[k] == events[next_event]) {
      contact = !contact;
      ++next_event;
    }
    steps[k] = {b[k + 1] - b[k], contact};
  }
  return steps;
}

double HorizonReference::node_time(int k) const {
  double t = t0;
  for (int i = 0; i < k; ++i) t += steps[i].dt;
  return t;
}

int HorizonReference::stance_steps() const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [](const HorizonStep& s) { return s.contact; }));
}

HorizonReference make_reference(const MotionSketch& sketch, double t0, const Vec6& x0,
                                double span, int N) {
  HorizonReference ref;
  ref.t0 = t0;
  ref.x0 = x0;
  std::vector<double> events;
  for (double e : sketch.events_between(t0, t0 + span)) {
    // Events closer than a microsecond to a horizon end are ignored.
    if (e - t0 > 1e-6 && t0 + span - e > 1e-6) events.push_back(e - t0);
  }
  while (static_cast<int>(events.size()) > N - 1) events.pop_back();
  // Contact at the start is decided just after t0 so that a horizon that
  // begins on a touchdown is a stance horizon.
  const bool c0 = sketch.stance_at(t0 + 1e-9) != nullptr;
  ref.steps = segment_timesteps(span / N, events, c0, N);

  double t = t0;
  ref.x_ref.reserve(static_cast<std::size_t>(N) + 1);
  for (int k = 0; k <= N; ++k) {
    const SketchSample s = sketch.sample(t);
    Vec6 x;
    x << s.com.p, 0.0, s.com.v, 0.0;
    ref.x_ref.push_back(x);
    if (k == N) break;
    const double dt = ref.steps[k].dt;
    const double tm = t + 0.5 * dt;
    const SketchSample mid = sketch.sample(tm);
    ref.foot.push_back(mid.foot);
    Vec2 f = Vec2::Zero();
    if (ref.steps[k].contact) {
      constexpr int kSub = 16;
      for (int i = 0; i <= kSub; ++i) {
        const double w = (i == 0 || i == kSub) ? 0.5 : 1.0;
        f += w * sketch.sample(t + dt * i / kSub).grf;
      }
      f /= kSub;
    }
    ref.f_ref.push_back(f);
    t += dt;
  }
  return ref;
}

}  // namespace hopper
