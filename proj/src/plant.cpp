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

#include "hopper/plant.hpp"

#include <algorithm>
#include <cmath>

namespace hopper {
namespace {

using Vec10 = Eigen::Matrix<double, 10, 1>;

// Flight state [p_c, theta, v_c, theta_dot, q, qdot].
Vec10 pack(const RobotState& r) {
  Vec10 y;
  y << r.torso(), r.q, r.qdot;
  return y;
}

void unpack(const Vec10& y, RobotState& r) {
  r.set_torso(y.head<6>());
  r.q = y.segment<2>(6);
  r.qdot = y.segment<2>(8);
}

template <typename Vec, typename F>
Vec rk4(const Vec& y, double h, F&& rhs) {
  const Vec k1 = rhs(y);
  const Vec k2 = rhs(Vec(y + 0.5 * h * k1));
  const Vec k3 = rhs(Vec(y + 0.5 * h * k2));
  const Vec k4 = rhs(Vec(y + h * k3));
  return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

void PlantSettings::validate() const {
  if (!(dt > 0.0 && dt <= 1e-3) || !(substep > 0.0) || !(rotor_inertia > 0.0) ||
      !(event_tolerance > 0.0) || !(cone_tolerance >= 0.0) ||
      !(cone_load_floor >= 0.0) || !(singular_det > 0.0)) {
    throw SchemaError("plant: dt must lie in (0, 1e-3] and all settings must be positive");
  }
}

Plant::Plant(RobotConstants constants, LegGeometry leg, UpsModel ups, PlantSettings settings)
    : constants_(constants), leg_(leg), ups_(ups), settings_(settings) {
  settings_.validate();
}

PlantState Plant::flight_state(const Vec2& com, const Vec2& velocity, const Vec2& q) const {
  PlantState s;
  s.robot.p_c = com;
  s.robot.v_c = velocity;
  s.robot.q = q;
  s.phase = Phase::kFlight;
  return s;
}

PlantState Plant::stance_state(const Vec2& com, const Vec2& velocity, const Vec2& foot) const {
  PlantState s;
  s.robot.p_c = com;
  s.robot.v_c = velocity;
  s.robot.q = inverse_kinematics(leg_, com, 0.0, foot);
  s.robot.contact = true;
  s.phase = Phase::kStance;
  s.stance_foot = foot;
  s.robot.qdot = stance_joint_rates(s.robot, foot);
  return s;
}

Vec2 Plant::foot_position(const PlantState& s) const {
  return forward_kinematics(leg_, s.robot.p_c, s.robot.theta, s.robot.q);
}

Vec2 Plant::stance_grf(const PlantState& s, const Vec2& tau) const {
  return grf_from_motor_torque(joint_jacobian(leg_, s.robot.theta, s.robot.q), tau, s.robot.q,
                               ups_);
}

Vec2 Plant::stance_torque(const PlantState& s, const Vec2& f) const {
  return stance_motor_torque(foot_jacobian(leg_, s.robot.theta, s.robot.q), f, s.robot.q, ups_);
}

Vec2 Plant::stance_joint_rates(const RobotState& r, const Vec2& foot) const {
  (void)foot;
  const Jacobian25 J = foot_jacobian(leg_, r.theta, r.q);
  const Vec2 body = r.v_c + J.col(2) * r.theta_dot;
  return -J.rightCols<2>().partialPivLu().solve(body);
}

Vec2 Plant::applied_torque(const PlantState& s, const ActuationCommand& cmd) const {
  const Vec2& lim = constants_.tau_max;
  Vec2 tau = Vec2::Zero();
  if (s.phase == Phase::kStance && cmd.mode == CommandMode::kStance) {
    tau = cmd.tau;
  } else if (s.phase == Phase::kFlight && cmd.mode == CommandMode::kSwing) {
    tau = cmd.kp.cwiseProduct(cmd.q_des - s.robot.q) - cmd.kd.cwiseProduct(s.robot.qdot) + cmd.tau;
  }
  return tau.cwiseMax(-lim).cwiseMin(lim);
}

bool Plant::outside_cone(const Vec2& f) const {
  if (f.y() <= settings_.cone_load_floor) return false;
  return std::abs(f.x()) > constants_.mu * f.y() + settings_.cone_tolerance;
}

void Plant::check(const PlantState& s, const Vec2& grf) const {
  if (!s.robot.finite()) throw PlantFault(s.time, "non-finite state");
  const Vec2 lo = constants_.q_min.array() - kJointSanityMargin;
  const Vec2 hi = constants_.q_max.array() + kJointSanityMargin;
  if ((s.robot.q.array() < lo.array()).any() || (s.robot.q.array() > hi.array()).any()) {
    throw PlantFault(s.time, "joint angles (" + std::to_string(s.robot.q(0)) + ", " +
                                 std::to_string(s.robot.q(1)) + ") outside the sanity box");
  }
  if (s.phase == Phase::kStance && outside_cone(grf)) {
    throw PlantFault(s.time, "ground force (" + std::to_string(grf.x()) + ", " +
                                 std::to_string(grf.y()) + ") outside the friction cone");
  }
}

StepResult Plant::step(const PlantState& state, const ActuationCommand& cmd, double dt) const {
  if (!(dt > 0.0) || dt > settings_.dt + 1e-15) {
    throw std::invalid_argument("plant step must lie in (0, dt]");
  }
  return state.phase == Phase::kStance ? step_stance(state, cmd, dt)
                                       : step_flight(state, cmd, dt);
}

StepResult Plant::step_flight(const PlantState& state, const ActuationCommand& cmd,
                              double dt) const {
  const double g = constants_.g();
  const double inertia = settings_.rotor_inertia;
  const Vec2 lim = constants_.tau_max;
  const bool pd = cmd.mode == CommandMode::kSwing;
  auto rhs = [&](const Vec10& y) {
    Vec10 d = Vec10::Zero();
    d.head<3>() = y.segment<3>(3);
    d(4) = -g;
    const Vec2 q = y.segment<2>(6);
    const Vec2 qd = y.segment<2>(8);
    Vec2 tau = Vec2::Zero();
    if (pd) {
      tau = (cmd.kp.cwiseProduct(cmd.q_des - q) - cmd.kd.cwiseProduct(qd) + cmd.tau)
                .cwiseMax(-lim)
                .cwiseMin(lim);
    }
    d.segment<2>(6) = qd;
    d.segment<2>(8) = (tau + ups_torque_vector(q, ups_)) / inertia;
    return d;
  };
  auto foot_height = [&](const Vec10& y) {
    return forward_kinematics(leg_, Vec2(y.head<2>()), y(2), Vec2(y.segment<2>(6))).y();
  };

  StepResult out;
  Vec10 y = pack(state.robot);
  double t = 0.0;
  while (t < dt - 1e-15) {
    const double h = std::min(settings_.substep, dt - t);
    const Vec10 next = rk4(y, h, rhs);
    if (!out.apex && y(4) > 0.0 && next(4) <= 0.0) {
      const double ta = y(4) / g;
      out.apex = ApexEvent{state.time + t + ta, ApexState{y(1) + 0.5 * y(4) * y(4) / g, y(3)}};
    }
    // Touchdown is armed once the torso descends.
    const bool descending = next(4) < 0.0;
    if (descending && foot_height(next) <= 0.0) {
      double lo = 0.0;
      double hi = h;
      if (foot_height(y) <= 0.0) hi = 0.0;
      while (hi - lo > settings_.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        (foot_height(rk4(y, mid, rhs)) <= 0.0 ? hi : lo) = mid;
      }
      const Vec10 td = hi > 0.0 ? rk4(y, hi, rhs) : y;
      out.state = state;
      unpack(td, out.state.robot);
      out.state.time = state.time + t + hi;
      out.state.phase = Phase::kStance;
      out.state.robot.contact = true;
      out.state.stance_foot = forward_kinematics(leg_, out.state.robot.p_c, out.state.robot.theta,
                                                 out.state.robot.q);
      out.state.stance_foot.y() = 0.0;
      // The bisection leaves the foot a few nm off the ground; close the gap
      // in the joints so the pinned foot and the leg agree exactly.
      out.state.robot.q = inverse_kinematics(leg_, out.state.robot.p_c, out.state.robot.theta,
                                             out.state.stance_foot);
      out.state.robot.qdot = stance_joint_rates(out.state.robot, out.state.stance_foot);
      out.elapsed = t + hi;
      out.event = PlantEvent::kTouchdown;
      check(out.state, Vec2::Zero());
      return out;
    }
    y = next;
    t += h;
  }
  out.state = state;
  unpack(y, out.state.robot);
  out.state.time = state.time + dt;
  out.elapsed = dt;
  out.tau = applied_torque(out.state, cmd);
  out.power = out.tau.cwiseProduct(out.state.robot.qdot);
  check(out.state, Vec2::Zero());
  return out;
}

StepResult Plant::step_stance(const PlantState& state, const ActuationCommand& cmd,
                              double dt) const {
  const Vec2 foot = state.stance_foot;
  const double m = constants_.mass;
  const double I = constants_.inertia;
  const Vec2 gvec = constants_.gravity;
  const bool commanded = cmd.mode == CommandMode::kStance;
  const Vec2 tau = commanded ? Vec2(cmd.tau.cwiseMax(-constants_.tau_max).cwiseMin(constants_.tau_max))
                             : Vec2::Zero();
  double t_now = state.time;

  auto joints = [&](const Vec6& x) {
    try {
      return inverse_kinematics(leg_, Vec2(x.head<2>()), x(2), foot);
    } catch (const OutOfWorkspace& e) {
      throw PlantFault(t_now, "stance foot out of reach (" + std::to_string(e.requested()) + " m)");
    }
  };
  auto grf = [&](const Vec6& x) {
    const Vec2 q = joints(x);
    const Mat2 Jq = joint_jacobian(leg_, x(2), q);
    if (std::abs(Jq.determinant()) < settings_.singular_det) {
      throw PlantFault(t_now, "singular stance leg (det " + std::to_string(Jq.determinant()) + ")");
    }
    return grf_from_motor_torque(Jq, tau, q, ups_);
  };
  // An unloaded foot on a compressing leg transmits no force.
  auto contact_force = [&](const Vec6& x) {
    const Vec2 f = grf(x);
    return f.y() > 0.0 ? f : Vec2::Zero();
  };
  auto rhs = [&](const Vec6& x) {
    const Vec2 f = contact_force(x);
    Vec6 d;
    d.head<3>() = x.tail<3>();
    d.segment<2>(3) = f / m + gvec;
    d(5) = wedge(Vec2(foot - x.head<2>()), f) / I;
    return d;
  };
  auto finish = [&](const Vec6& x, double elapsed, bool lift) {
    StepResult out;
    out.state = state;
    out.state.robot.set_torso(x);
    out.state.robot.q = joints(x);
    out.state.robot.qdot = stance_joint_rates(out.state.robot, foot);
    out.state.time = state.time + elapsed;
    out.elapsed = elapsed;
    out.tau = tau;
    out.grf = lift ? Vec2::Zero() : contact_force(x);
    out.power = tau.cwiseProduct(out.state.robot.qdot);
    if (lift) {
      out.event = PlantEvent::kLiftoff;
      out.state.phase = Phase::kFlight;
      out.state.robot.contact = false;
    }
    check(out.state, out.grf);
    return out;
  };

  // The foot leaves the ground only when the normal force vanishes while
  // the leg is extending; a compressing leg stays pinned.
  auto lifts = [&](const Vec6& x, const Vec2& f) {
    return commanded && f.y() <= 0.0 &&
           (Vec2(x.head<2>()) - foot).dot(Vec2(x.segment<2>(3))) > 0.0;
  };
  Vec6 x = state.robot.torso();
  if (lifts(x, grf(x))) return finish(x, 0.0, true);
  double t = 0.0;
  while (t < dt - 1e-15) {
    const double h = std::min(settings_.substep, dt - t);
    t_now = state.time + t;
    const Vec6 next = rk4(x, h, rhs);
    const Vec2 f = grf(next);
    if (lifts(next, f)) {
      double lo = 0.0;
      double hi = h;
      while (hi - lo > settings_.event_tolerance) {
        const double mid = 0.5 * (lo + hi);
        const Vec6 xm = rk4(x, mid, rhs);
        (lifts(xm, grf(xm)) ? hi : lo) = mid;
      }
      return finish(rk4(x, hi, rhs), t + hi, true);
    }
    if (outside_cone(f)) {
      throw PlantFault(t_now + h, "ground force (" + std::to_string(f.x()) + ", " +
                                      std::to_string(f.y()) + ") outside the friction cone");
    }
    x = next;
    t += h;
  }
  return finish(x, dt, false);
}

std::vector<ApexEvent> detect_apex(const std::vector<PlantState>& history, double g) {
  std::vector<ApexEvent> out;
  for (std::size_t i = 1; i < history.size(); ++i) {
    const PlantState& a = history[i - 1];
    const PlantState& b = history[i];
    if (a.phase != Phase::kFlight || b.phase != Phase::kFlight) continue;
    if (a.robot.v_c.y() > 0.0 && b.robot.v_c.y() <= 0.0) {
      const double vz = a.robot.v_c.y();
      out.push_back({a.time + vz / g, ApexState{a.robot.p_c.y() + 0.5 * vz * vz / g, a.robot.v_c.x()}});
    }
  }
  return out;
}

}  // namespace hopper
