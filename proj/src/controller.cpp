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

#include "hopper/controller.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace hopper {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

void ControllerSettings::validate() const {
  if (!(tick > 0.0) || !(horizon > 0.0) || !(clearance >= 0.0) || !(swing_settle >= 0.0) ||
      !(height_gain >= 0.0) || !(speed_trim_gain >= 0.0) || !(speed_trim_limit >= 0.0) ||
      !(speed_trim_band >= 0.0) ||
      !(cone_margin > 0.0 && cone_margin <= 1.0) || !(sketch_dt > 0.0)) {
    throw SchemaError("controller: tick, horizon and sketch_dt must be positive, gains non-negative, cone_margin in (0, 1]");
  }
  weights.validate();
  srb_qp.validate();
  sqp.validate();
  pd.validate();
}

Vec2 project_to_cone(const Vec2& f, double mu) {
  if (f.y() >= 0.0 && std::abs(f.x()) <= mu * f.y()) return f;
  const Vec2 u = Vec2(f.x() >= 0.0 ? mu : -mu, 1.0).normalized();
  const double d = f.dot(u);
  return d > 0.0 ? Vec2(d * u) : Vec2::Zero();
}

Controller::Controller(std::shared_ptr<const GaitLibrary> library, KinoModel model,
                       ControllerSettings settings)
    : library_(std::move(library)),
      model_(model),
      settings_(settings),
      srb_(model.srb, settings.weights, settings.srb_qp),
      kino_(model, settings.weights, settings.sqp) {
  if (!library_) throw std::invalid_argument("controller needs a gait library");
  settings_.validate();
}

AlphaPolicy Controller::policy() const { return deadbeat_policy(fsm_.tuple); }

SketchOptions Controller::sketch_options() const {
  SketchOptions o;
  o.dt_sample = settings_.sketch_dt;
  o.min_duration = settings_.horizon + 2.0 * settings_.tick;
  o.restore_height = fsm_.tuple.apex.height;
  o.restore_gain = settings_.height_gain;
  return o;
}

ActuationCommand Controller::tick(const PlantState& s, double desired_speed) {
  const auto start = Clock::now();
  telemetry_ = TickTelemetry{};
  telemetry_.time = s.time;
  telemetry_.mode = s.phase;
  desired_speed_ = desired_speed;

  if (!fsm_.started) {
    fsm_.started = true;
    fsm_.mode = s.phase;
    const SpeedGrid& g = library_->grid();
    fsm_.tuple = library_->query(std::clamp(desired_speed, g.min, g.max));
    if (s.phase == Phase::kStance) {
      on_touchdown(s);
    } else {
      auto out = sketch_from_flight(SlipState{s.robot.p_c, s.robot.v_c}, s.time, fsm_.tuple.alpha,
                                    policy(), library_->params(), sketch_options());
      if (out) fsm_.sketch = std::move(out.sketch);
      telemetry_.sketch_failure = !out;
      telemetry_.sketch_status = out.failure;
      fsm_.swing.points.fill(foot_world(s) - s.robot.p_c);
      fsm_.swing.start_time = s.time;
      retarget_swing(s, true);
    }
  } else if (s.phase != fsm_.mode) {
    fsm_.mode = s.phase;
    if (s.phase == Phase::kStance) {
      on_touchdown(s);
    } else {
      on_liftoff(s);
    }
  }

  ActuationCommand cmd;
  if (s.phase == Phase::kFlight) {
    if (!fsm_.apex_seen && s.robot.v_c.y() <= 0.0) on_apex(s);
    cmd = swing_command(s);
  } else {
    cmd = stance_command(s);
  }
  telemetry_.total_ms = ms_since(start);
  return cmd;
}

Vec2 Controller::foot_world(const PlantState& s) const {
  return forward_kinematics(model_.leg, s.robot.p_c, s.robot.theta, s.robot.q);
}

void Controller::on_touchdown(const PlantState& s) {
  telemetry_.touchdown_reset = true;
  SlipState start{s.robot.p_c, s.robot.v_c};
  if (fsm_.tuple.apex.height > 0.0) {
    start = restore_touchdown_energy(start, fsm_.tuple.apex.height, settings_.height_gain,
                                     library_->params().g);
  }
  auto out = sketch_from_stance(start, s.stance_foot, s.time, policy(), library_->params(),
                                sketch_options());
  if (out) {
    fsm_.sketch = std::move(out.sketch);
  } else {
    telemetry_.sketch_failure = true;
    telemetry_.sketch_status = out.failure;
  }
}

void Controller::on_liftoff(const PlantState& s) {
  fsm_.apex_seen = false;
  retarget_swing(s, true);
}

void Controller::on_apex(const PlantState& s) {
  fsm_.apex_seen = true;
  const double vz = s.robot.v_c.y();
  const ApexState measured{s.robot.p_c.y() + 0.5 * vz * vz / library_->params().g,
                           s.robot.v_c.x()};
  if (desired_speed_ != fsm_.trim_command) {
    fsm_.trim_command = desired_speed_;
    fsm_.speed_trim = 0.0;
  }
  const double error = desired_speed_ - measured.velocity;
  if (std::abs(error) <= settings_.speed_trim_band) {
    fsm_.speed_trim = std::clamp(fsm_.speed_trim + settings_.speed_trim_gain * error,
                                 -settings_.speed_trim_limit, settings_.speed_trim_limit);
  }
  const SpeedGrid& g = library_->grid();
  fsm_.tuple = library_->query(std::clamp(desired_speed_ + fsm_.speed_trim, g.min, g.max));
  const double alpha = deadbeat_alpha(fsm_.tuple, measured);
  telemetry_.alpha = alpha;
  auto out = sketch_from_flight(SlipState{s.robot.p_c, s.robot.v_c}, s.time, alpha, policy(),
                                library_->params(), sketch_options());
  if (!out) {
    telemetry_.sketch_failure = true;
    telemetry_.sketch_status = out.failure;
    return;
  }
  fsm_.sketch = std::move(out.sketch);
  ++fsm_.sketch_regenerations;
  telemetry_.apex_update = true;
  retarget_swing(s, false);
}

void Controller::retarget_swing(const PlantState& s, bool restart) {
  Vec2 start = fsm_.swing.points[0];
  double start_time = fsm_.swing.start_time;
  if (restart) {
    start = foot_world(s) - s.robot.p_c;
    start_time = s.time;
  }
  if (!fsm_.sketch) return;
  const auto& windows = fsm_.sketch->stances;
  const auto next = std::find_if(windows.begin(), windows.end(),
                                 [&](const ContactWindow& w) { return w.touchdown > s.time; });
  if (next == windows.end()) return;
  const Vec2 target = next->foot - fsm_.sketch->sample(next->touchdown).com.p;
  const double duration = std::max(next->touchdown - settings_.swing_settle - start_time, settings_.tick);
  // The curve lives in the hip frame; the torso rise over the flight already
  // lifts the foot, so only the missing ground clearance is added.
  double peak = s.robot.p_c.y();
  for (std::size_t i = 0; i < fsm_.sketch->times.size(); ++i) {
    const double t = fsm_.sketch->times[i];
    if (t >= s.time && t <= next->touchdown) peak = std::max(peak, fsm_.sketch->com[i].p.y());
  }
  const double rise = peak - fsm_.sketch->sample(next->touchdown).com.p.y();
  const double lift = std::max(0.0, settings_.clearance - rise);
  fsm_.swing = swing_trajectory(start, target, start_time, duration, lift);
}

ActuationCommand Controller::swing_command(const PlantState& s) const {
  ActuationCommand cmd;
  cmd.mode = CommandMode::kSwing;
  cmd.kp = settings_.pd.kp;
  cmd.kd = settings_.pd.kd;
  const Vec2 rel = fsm_.swing.at_time(s.time + settings_.tick);
  const IkResult ik =
      inverse_kinematics_clamped(model_.leg, s.robot.p_c, s.robot.theta, Vec2(s.robot.p_c + rel));
  cmd.q_des = ik.q.cwiseMax(model_.q_min).cwiseMin(model_.q_max);
  // Cancels the knee spring at the target so the PD settles on it.
  cmd.tau = -ups_torque_vector(cmd.q_des, model_.ups);
  return cmd;
}

void Controller::ensure_sketch(const PlantState& s) {
  if (!fsm_.sketch) return;
  const double need = s.time + settings_.horizon + 2.0 * settings_.tick;
  if (fsm_.sketch->end_time() < need) {
    if (extend_sketch(*fsm_.sketch, need, policy(), library_->params(), sketch_options()) !=
        SlipFailure::kNone) {
      telemetry_.sketch_failure = true;
    }
  }
}

ActuationCommand Controller::liftoff_command(const PlantState& s) const {
  ActuationCommand cmd;
  cmd.mode = CommandMode::kStance;
  const Jacobian25 J = foot_jacobian(model_.leg, s.robot.theta, s.robot.q);
  cmd.tau = stance_motor_torque(J, Vec2(0.0, -1.0), s.robot.q, model_.ups)
                .cwiseMax(-model_.tau_max)
                .cwiseMin(model_.tau_max);
  return cmd;
}

Vec2 Controller::filtered_torque(const PlantState& s, const Vec2& tau) {
  const Vec2& q = s.robot.q;
  const Jacobian25 J = foot_jacobian(model_.leg, s.robot.theta, q);
  const Mat2 Jq = J.rightCols<2>();
  const Vec2 f = grf_from_motor_torque(Jq, tau, q, model_.ups);
  const Vec2 fp = project_to_cone(f, settings_.cone_margin * model_.srb.mu);
  // tau(lambda) = lambda a + b; keep the largest lambda in [0, 1] inside the
  // torque limits so the applied force stays on the ray of fp.
  const Vec2 a = -(Jq.transpose() * fp);
  const Vec2 b = -ups_torque_vector(q, model_.ups);
  double lambda = 1.0;
  for (int i = 0; i < 2; ++i) {
    if (std::abs(a(i)) < 1e-12) continue;
    const double edge = a(i) > 0.0 ? model_.tau_max(i) : -model_.tau_max(i);
    lambda = std::min(lambda, (edge - b(i)) / a(i));
  }
  lambda = std::max(lambda, 0.0);
  telemetry_.filtered = lambda < 1.0 || (fp - f).norm() > 1e-9;
  return (lambda * a + b).cwiseMax(-model_.tau_max).cwiseMin(model_.tau_max);
}

ActuationCommand Controller::stance_command(const PlantState& s) {
  ensure_sketch(s);
  if (!fsm_.sketch || !fsm_.sketch->stance_at(s.time)) return liftoff_command(s);

  const HorizonReference ref = make_reference(*fsm_.sketch, s.time, s.robot.torso(),
                                              settings_.horizon, settings_.weights.N);
  fsm_.schedule = ref.steps;
  if (!ref.steps.front().contact) return liftoff_command(s);

  telemetry_.mpc = true;
  auto t0 = Clock::now();
  fsm_.last_srb = srb_.solve(ref);
  telemetry_.srb_ms = ms_since(t0);
  telemetry_.srb_iterations = fsm_.last_srb.iterations;
  t0 = Clock::now();
  const MpcSolution kino = kino_.solve(ref, fsm_.last_srb);
  telemetry_.kino_ms = ms_since(t0);
  telemetry_.kino_iterations = kino.iterations;
  telemetry_.max_violation = kino.max_violation;
  telemetry_.ik_clamped = kino.ik_clamped;

  Vec2 tau;
  if (kino.degraded) {
    telemetry_.degraded = true;
    // Keep the previous plan: its step at the current time, if it is a
    // stance step.
    const MpcSolution& prev = fsm_.last_kino;
    double t = prev.t0;
    int k = -1;
    for (std::size_t i = 0; i < prev.steps.size(); ++i) {
      if (s.time < t + prev.steps[i].dt) {
        k = static_cast<int>(i);
        break;
      }
      t += prev.steps[i].dt;
    }
    if (k >= 0 && prev.steps[k].contact) {
      tau = torque_extraction(prev, model_.tau_max, k);
    } else {
      const Jacobian25 J = foot_jacobian(model_.leg, s.robot.theta, s.robot.q);
      tau = stance_motor_torque(J, fsm_.last_srb.grf.front(), s.robot.q, model_.ups);
    }
  } else {
    fsm_.last_kino = kino;
    tau = torque_extraction(kino, model_.tau_max);
  }

  // The first step force is a mean over the whole step. Add back the
  // reference profile inside the step so the spring shape is kept.
  const Vec2 df = fsm_.sketch->sample(s.time).grf - ref.f_ref.front();
  const Jacobian25 J = foot_jacobian(model_.leg, s.robot.theta, s.robot.q);
  tau += stance_motor_torque(J, df, s.robot.q, model_.ups) -
         stance_motor_torque(J, Vec2::Zero(), s.robot.q, model_.ups);

  ActuationCommand cmd;
  cmd.mode = CommandMode::kStance;
  cmd.tau = filtered_torque(s, tau);
  return cmd;
}

}  // namespace hopper
