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

#ifndef HOPPER_CONTROLLER_HPP_
#define HOPPER_CONTROLLER_HPP_

// Gait state machine run at the control rate. Flight: the swing foot follows
// a Bezier in the hip-relative frame, and the SLIP sketch is regenerated once
// per flight at the apex from the deadbeat law. Stance: the rigid-body MPC
// warm-starts the kinodynamic MPC whose first torque is applied.

#include <memory>
#include <optional>
#include <vector>

#include "hopper/gait_library.hpp"
#include "hopper/horizon.hpp"
#include "hopper/kino_mpc.hpp"
#include "hopper/motion_sketch.hpp"
#include "hopper/plant.hpp"
#include "hopper/srb_mpc.hpp"
#include "hopper/swing.hpp"

namespace hopper {

struct ControllerSettings {
  double tick = 0.005;         // [s]
  double horizon = 0.45;       // [s], split into weights.N steps
  MpcWeights weights;
  SolverSettings srb_qp = srb_qp_defaults();
  SqpSettings sqp;
  PdGains pd;
  double clearance = 0.08;     // [m]
  double swing_settle = 0.03;  // swing ends this long before touchdown [s]
  double height_gain = 1.0;    // share of the apex energy error removed per hop
  double speed_trim_gain = 0.5;   // apex speed error added to the library query per hop
  double speed_trim_limit = 0.3;  // [m/s]
  double speed_trim_band = 0.25;  // larger errors are transients and are not integrated [m/s]
  double cone_margin = 0.95;   // fraction of mu used by the safety filter
  double sketch_dt = 0.005;    // [s]

  void validate() const;
};

/// Per-tick record for the run log.
struct TickTelemetry {
  double time = 0.0;
  Phase mode = Phase::kFlight;
  bool mpc = false;            // MPC layers ran this tick
  bool apex_update = false;    // sketch regenerated at an apex
  bool touchdown_reset = false;
  bool sketch_failure = false;
  SlipFailure sketch_status = SlipFailure::kNone;
  bool degraded = false;
  bool ik_clamped = false;
  bool filtered = false;       // safety filter changed the command
  double alpha = 0.0;          // touchdown angle chosen at the apex
  int srb_iterations = 0;
  int kino_iterations = 0;
  double max_violation = 0.0;
  double srb_ms = 0.0;
  double kino_ms = 0.0;
  double total_ms = 0.0;
};

struct FsmState {
  Phase mode = Phase::kFlight;
  bool started = false;
  bool apex_seen = false;
  std::optional<MotionSketch> sketch;
  MpcSolution last_srb;
  MpcSolution last_kino;
  SwingCurve swing;            // foot relative to the CoM, world axes
  std::vector<HorizonStep> schedule;
  GaitTuple tuple;
  double speed_trim = 0.0;     // offset of the library query speed [m/s]
  double trim_command = 0.0;   // command the trim was built for
  int sketch_regenerations = 0;
};

class Controller {
 public:
  Controller(std::shared_ptr<const GaitLibrary> library, KinoModel model,
             ControllerSettings settings = {});

  ActuationCommand tick(const PlantState& state, double desired_speed);

  const TickTelemetry& telemetry() const { return telemetry_; }
  const FsmState& fsm() const { return fsm_; }
  const ControllerSettings& settings() const { return settings_; }
  const KinoModel& model() const { return model_; }

 private:
  void on_touchdown(const PlantState& s);
  void on_liftoff(const PlantState& s);
  void on_apex(const PlantState& s);
  void retarget_swing(const PlantState& s, bool restart);
  void ensure_sketch(const PlantState& s);
  ActuationCommand swing_command(const PlantState& s) const;
  ActuationCommand stance_command(const PlantState& s);
  ActuationCommand liftoff_command(const PlantState& s) const;
  Vec2 foot_world(const PlantState& s) const;
  Vec2 filtered_torque(const PlantState& s, const Vec2& tau);
  AlphaPolicy policy() const;
  SketchOptions sketch_options() const;

  std::shared_ptr<const GaitLibrary> library_;
  KinoModel model_;
  ControllerSettings settings_;
  SrbMpc srb_;
  KinoMpc kino_;
  FsmState fsm_;
  TickTelemetry telemetry_;
  double desired_speed_ = 0.0;
};

/// Euclidean projection onto {f_z >= 0, |f_x| <= mu f_z}.
Vec2 project_to_cone(const Vec2& f, double mu);

}  // namespace hopper

#endif  // HOPPER_CONTROLLER_HPP_
