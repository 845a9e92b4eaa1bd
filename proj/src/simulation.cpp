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

#include "hopper/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hopper {
namespace {

constexpr int kPersistentDegradation = 20;

}  // namespace

int RunOptions::total_hops() const {
  int n = 0;
  for (const VelocitySegment& s : profile) n += s.hops;
  return n;
}

double RunOptions::speed_at_hop(int hop) const {
  if (profile.empty()) throw std::invalid_argument("empty velocity profile");
  int n = 0;
  for (const VelocitySegment& s : profile) {
    n += s.hops;
    if (hop < n) return s.speed;
  }
  return profile.back().speed;
}

PlantState initial_state(const RunSetup& setup, const GaitLibrary& library,
                         const RunOptions& options) {
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double height = options.start_height + options.height_jitter * u(rng);
  const double speed = options.start_speed + options.speed_jitter * u(rng);
  const SpeedGrid& g = library.grid();
  const GaitTuple tuple = library.query(std::clamp(options.speed_at_hop(0), g.min, g.max));
  const double r0 = library.params().r0;
  const Vec2 com(0.0, height);
  const Vec2 foot = com + r0 * Vec2(std::sin(tuple.alpha), -std::cos(tuple.alpha));
  PlantState s;
  s.robot.p_c = com;
  s.robot.v_c = Vec2(speed, 0.0);
  s.robot.q = inverse_kinematics(setup.leg, com, 0.0, foot);
  s.phase = Phase::kFlight;
  return s;
}

RunResult run_closed_loop(const RunSetup& setup, std::shared_ptr<const GaitLibrary> library,
                          const RunOptions& options) {
  if (options.total_hops() <= 0) throw std::invalid_argument("run: profile has no hops");
  RunResult out;
  const Plant plant(setup.constants, setup.leg, setup.ups, setup.plant);
  Controller ctl(library, make_kino_model(setup.constants, setup.leg, setup.ups),
                 setup.controller);
  const double tick = setup.controller.tick;

  PlantState state = initial_state(setup, *library, options);
  int hop = 0;
  double v_des = options.speed_at_hop(0);
  std::int64_t tick_index = 0;
  int degraded_run = 0;
  EnergyAccumulator acc;
  const double x_start = state.robot.p_c.x();

  auto log_tick = [&]() {
    const TickTelemetry& tel = ctl.telemetry();
    if (tel.mpc) {
      ++out.mpc_ticks;
      if (tel.max_violation > setup.controller.sqp.constraint_tolerance) ++out.violation_ticks;
    }
    if (tel.degraded) {
      ++out.degraded_ticks;
      ++degraded_run;
    } else if (tel.mpc) {
      degraded_run = 0;
    }
    if (options.keep_ticks) out.ticks.push_back({tick_index, tel});
  };
  auto record = [&](const Vec2& grf, const Vec2& tau) {
    const double p = power_sample(tau, state.robot.qdot, setup.motor);
    acc.add(state.time, p, state.robot.p_c.x());
    out.max_abs_pitch = std::max(out.max_abs_pitch, std::abs(state.robot.theta));
    out.torques.push_back({tau, state.phase == Phase::kStance});
    if (options.keep_samples) {
      RunSample row;
      row.time = state.time;
      row.robot = state.robot;
      row.phase = state.phase;
      row.grf = grf;
      row.tau = tau;
      row.power = p;
      row.energy = acc.total_positive_energy();
      row.desired_speed = v_des;
      row.tick = tick_index;
      out.samples.push_back(row);
    }
  };

  ActuationCommand cmd = ctl.tick(state, v_des);
  log_tick();
  out.apexes.push_back({0, state.time,
                        ApexState{state.robot.p_c.y(), state.robot.v_c.x()}, v_des, 0.0,
                        state.robot.p_c.x()});
  record(Vec2::Zero(), plant.applied_torque(state, cmd));
  double next_tick = state.time + tick;

  while (true) {
    if (static_cast<int>(out.apexes.size()) > options.total_hops()) {
      out.completed = true;
      break;
    }
    if (state.time > options.max_time) {
      out.fault = "time limit reached before the profile finished";
      out.fault_tick = tick_index;
      break;
    }
    const double dt = std::min(setup.plant.dt, next_tick - state.time);
    StepResult r;
    try {
      if (dt > 1e-12) {
        r = plant.step(state, cmd, dt);
      } else {
        r.state = state;
      }
    } catch (const PlantFault& e) {
      out.fault = e.what();
      out.fault_tick = tick_index;
      break;
    }
    state = r.state;
    record(r.grf, r.tau);
    if (r.apex) {
      ++hop;
      out.apexes.push_back({hop, r.apex->time, r.apex->apex, v_des, acc.total_positive_energy(),
                            state.robot.p_c.x() - state.robot.v_c.x() * (state.time - r.apex->time)});
      v_des = options.speed_at_hop(hop);
    }
    if (r.event == PlantEvent::kTouchdown) out.touchdowns.push_back(state.time);
    const bool on_schedule = state.time >= next_tick - 1e-12;
    if (r.event != PlantEvent::kNone || on_schedule) {
      if (on_schedule) next_tick += tick;
      ++tick_index;
      cmd = ctl.tick(state, v_des);
      log_tick();
      if (degraded_run >= kPersistentDegradation) {
        out.fault = "persistent MPC degradation";
        out.fault_tick = tick_index;
        break;
      }
    }
  }
  out.energy = acc.total_positive_energy();
  out.duration = acc.duration();
  out.distance = state.robot.p_c.x() - x_start;
  return out;
}

std::optional<SteadyWindow> steady_window(const RunResult& result, int hops, int settle,
                                          double tolerance) {
  const auto& a = result.apexes;
  int streak = 0;
  for (std::size_t i = 1; i < a.size(); ++i) {
    const bool ok = std::abs(a[i].apex.velocity - a[i].desired_speed) <= tolerance;
    streak = ok ? streak + 1 : 0;
    if (streak < settle) continue;
    const std::size_t last = i + static_cast<std::size_t>(hops);
    if (last >= a.size()) return std::nullopt;
    SteadyWindow w;
    w.first = i;
    w.last = last;
    w.energy = a[last].energy - a[i].energy;
    w.distance = a[last].x - a[i].x;
    w.duration = a[last].time - a[i].time;
    int td = 0;
    for (double t : result.touchdowns) td += (t > a[i].time && t <= a[last].time) ? 1 : 0;
    w.frequency = td / w.duration;
    w.mean_speed = w.distance / w.duration;
    return w;
  }
  return std::nullopt;
}

}  // namespace hopper
