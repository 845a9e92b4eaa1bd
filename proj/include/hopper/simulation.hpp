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

#ifndef HOPPER_SIMULATION_HPP_
#define HOPPER_SIMULATION_HPP_

// Closed-loop runs: plant stepping at the plant rate, controller ticks at
// the control rate and immediately after every contact event, energy
// metering and the run log.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hopper/controller.hpp"
#include "hopper/energy.hpp"
#include "hopper/plant.hpp"

namespace hopper {

/// Commanded speed held for a number of hops (apex to apex).
struct VelocitySegment {
  int hops = 10;
  double speed = 0.0;
};

struct RunOptions {
  std::vector<VelocitySegment> profile{{10, 0.0}};
  double start_height = 0.45;     // initial apex height [m]
  double start_speed = 0.0;       // initial apex speed [m/s]
  std::uint64_t seed = 0;         // seeds the initial-state perturbation
  double height_jitter = 0.005;   // [m], uniform
  double speed_jitter = 0.02;     // [m/s], uniform
  double max_time = 60.0;         // [s]
  bool keep_samples = true;       // plant-rate log rows
  bool keep_ticks = true;

  int total_hops() const;
  double speed_at_hop(int hop) const;
};

/// Plant-rate log row.
struct RunSample {
  double time = 0.0;
  RobotState robot;
  Phase phase = Phase::kFlight;
  Vec2 grf = Vec2::Zero();
  Vec2 tau = Vec2::Zero();
  double power = 0.0;       // P+ of both motors [W]
  double energy = 0.0;      // cumulative E+ [J]
  double desired_speed = 0.0;
  std::int64_t tick = 0;    // join key into the tick log
};

struct ApexRecord {
  int hop = 0;
  double time = 0.0;
  ApexState apex;
  double desired_speed = 0.0;
  double energy = 0.0;      // cumulative E+ at the apex [J]
  double x = 0.0;           // CoM x at the apex [m]
};

struct TickRecord {
  std::int64_t index = 0;
  TickTelemetry telemetry;
};

struct RunResult {
  std::vector<RunSample> samples;
  std::vector<TickRecord> ticks;
  std::vector<ApexRecord> apexes;
  std::vector<double> touchdowns;
  std::vector<TorqueSample> torques;   // plant-rate motor torques
  double energy = 0.0;                 // total E+ [J]
  double duration = 0.0;
  double distance = 0.0;
  double max_abs_pitch = 0.0;
  int degraded_ticks = 0;
  int mpc_ticks = 0;
  int violation_ticks = 0;             // kino violation above tolerance
  std::optional<std::string> fault;    // plant fault or sketch failure
  std::int64_t fault_tick = -1;
  bool completed = false;
};

struct RunSetup {
  RobotConstants constants;
  LegGeometry leg;
  UpsModel ups;
  MotorModel motor;
  PlantSettings plant;
  ControllerSettings controller;
};

/// Initial flight state at an apex with the leg at the touchdown pose of the
/// library entry for the first commanded speed.
PlantState initial_state(const RunSetup& setup, const GaitLibrary& library,
                         const RunOptions& options);

RunResult run_closed_loop(const RunSetup& setup, std::shared_ptr<const GaitLibrary> library,
                          const RunOptions& options);

/// Steady window: starts at the first apex that closes a run of `settle`
/// consecutive apexes within `tolerance` of the command and spans `hops`
/// apex-to-apex cycles. Returns indices into result.apexes.
struct SteadyWindow {
  std::size_t first = 0;
  std::size_t last = 0;
  double energy = 0.0;
  double distance = 0.0;
  double duration = 0.0;
  double frequency = 0.0;   // touchdowns per second inside the window
  double mean_speed = 0.0;
};

std::optional<SteadyWindow> steady_window(const RunResult& result, int hops, int settle = 3,
                                          double tolerance = 0.1);

}  // namespace hopper

#endif  // HOPPER_SIMULATION_HPP_
