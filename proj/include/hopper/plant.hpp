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

#ifndef HOPPER_PLANT_HPP_
#define HOPPER_PLANT_HPP_

// Planar plant used to close the loop: a rigid torso with a massless
// two-link leg. In stance the foot is pinned and the ground force follows
// from the joint torques through the static force map; in flight the torso
// is ballistic and the joints are driven by a PD loop acting on a small
// rotor inertia.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopper/kinematics.hpp"
#include "hopper/slip.hpp"
#include "hopper/types.hpp"

namespace hopper {

enum class Phase { kFlight, kStance };

struct PlantState {
  RobotState robot;
  Phase phase = Phase::kFlight;
  Vec2 stance_foot = Vec2::Zero();
  double time = 0.0;
};

enum class CommandMode { kStance, kSwing };

/// Stance: motor torque held over the step. Swing: joint targets for the
/// PD loop, evaluated at the integration rate.
struct ActuationCommand {
  CommandMode mode = CommandMode::kSwing;
  Vec2 tau = Vec2::Zero();  // stance torque; in swing, feedforward added to the PD
  Vec2 q_des = Vec2::Zero();
  Vec2 kp{40.0, 40.0};
  Vec2 kd{0.5, 0.5};
};

struct PlantSettings {
  double dt = 1e-3;               // [s]
  double substep = 1e-4;          // RK4 step inside one plant step
  double rotor_inertia = 1e-4;    // [kg m^2] per joint, flight only
  double event_tolerance = 1e-8;  // [s]
  double cone_tolerance = 1e-6;   // [N]
  double cone_load_floor = 2.0;   // no slip check below this normal force [N]
  double singular_det = 1e-8;

  void validate() const;
};

class PlantFault : public std::runtime_error {
 public:
  PlantFault(double time, const std::string& what)
      : std::runtime_error(what + " at t = " + std::to_string(time) + " s"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

enum class PlantEvent { kNone, kTouchdown, kLiftoff };

struct ApexEvent {
  double time = 0.0;
  ApexState apex;
};

struct StepResult {
  PlantState state;
  double elapsed = 0.0;     // shorter than dt when an event ended the step
  PlantEvent event = PlantEvent::kNone;
  std::optional<ApexEvent> apex;
  Vec2 grf = Vec2::Zero();  // at the end of the step
  Vec2 tau = Vec2::Zero();  // motor torque applied at the end of the step
  Vec2 power = Vec2::Zero();  // per-motor mechanical power tau_i qdot_i
};

class Plant {
 public:
  Plant(RobotConstants constants, LegGeometry leg, UpsModel ups, PlantSettings settings = {});

  /// Advances up to dt, stopping early at touchdown or liftoff. Throws
  /// PlantFault on a singular stance leg, a friction-cone violation, a
  /// non-finite state or joints outside the sanity box.
  StepResult step(const PlantState& state, const ActuationCommand& cmd, double dt) const;

  /// Flight state with the torso at rest at a given CoM and the joints at q.
  PlantState flight_state(const Vec2& com, const Vec2& velocity, const Vec2& q) const;

  /// Stance state pinned at foot; joints by inverse kinematics.
  PlantState stance_state(const Vec2& com, const Vec2& velocity, const Vec2& foot) const;

  Vec2 foot_position(const PlantState& state) const;
  /// Ground force for a motor torque at the current stance configuration.
  Vec2 stance_grf(const PlantState& state, const Vec2& tau) const;
  /// Motor torque that produces the ground force f at the current stance
  /// configuration.
  Vec2 stance_torque(const PlantState& state, const Vec2& f) const;
  /// Joint rates implied by a pinned foot.
  Vec2 stance_joint_rates(const RobotState& robot, const Vec2& foot) const;
  /// Motor torque applied for a command in the given state.
  Vec2 applied_torque(const PlantState& state, const ActuationCommand& cmd) const;
  bool outside_cone(const Vec2& grf) const;

  const RobotConstants& constants() const { return constants_; }
  const LegGeometry& leg() const { return leg_; }
  const UpsModel& ups() const { return ups_; }
  UpsModel& ups() { return ups_; }
  const PlantSettings& settings() const { return settings_; }

 private:
  StepResult step_flight(const PlantState& state, const ActuationCommand& cmd, double dt) const;
  StepResult step_stance(const PlantState& state, const ActuationCommand& cmd, double dt) const;
  void check(const PlantState& state, const Vec2& grf) const;

  RobotConstants constants_;
  LegGeometry leg_;
  UpsModel ups_;
  PlantSettings settings_;
};

/// Apex events in a sampled flight history: zero crossings of the vertical
/// velocity between consecutive flight samples, refined with the ballistic
/// solution from the earlier sample.
std::vector<ApexEvent> detect_apex(const std::vector<PlantState>& history, double g);

}  // namespace hopper

#endif  // HOPPER_PLANT_HPP_
