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

#ifndef HOPPER_KINEMATICS_HPP_
#define HOPPER_KINEMATICS_HPP_

// Planar two-link leg attached to a pitching torso.
//
// Generalized coordinates are ordered [com_x, com_z, pitch, q_hip, q_knee].
// The hip angle rotates the whole chain counter-clockwise from the torso
// downward vertical and the knee angle rotates the shank relative to the
// thigh, so q = (beta, -2 beta) puts the foot straight under the hip.

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/LU>

#include "hopper/types.hpp"

namespace hopper {

struct LegGeometry {
  double thigh_length = 0.20;
  double shank_length = 0.20;
  Vec2 hip_offset_body = Vec2::Zero();  // hip in torso frame, relative to CoM

  double max_reach() const { return thigh_length + shank_length; }
  double min_reach() const { return std::abs(thigh_length - shank_length); }
};

/// Unidirectional knee spring, linear in knee angle past engagement.
struct UpsModel {
  double stiffness = 30.0;          // [N m/rad]
  double engagement_angle = -1.2;   // [rad]
  bool enabled = true;
};

/// The requested foot lies outside the leg workspace annulus.
class OutOfWorkspace : public std::runtime_error {
 public:
  OutOfWorkspace(double requested, double max_reach)
      : std::runtime_error("foot target out of workspace: requested reach " +
                           std::to_string(requested) + " m, maximum " +
                           std::to_string(max_reach) + " m"),
        requested_(requested),
        max_reach_(max_reach) {}
  double requested() const { return requested_; }
  double max_reach() const { return max_reach_; }

 private:
  double requested_;
  double max_reach_;
};

using Jacobian25 = Eigen::Matrix<double, 2, 5>;

/// Hip-to-foot vector in the torso frame.
template <typename Scalar>
Vector2<Scalar> leg_chain(const LegGeometry& leg, const Vector2<Scalar>& q) {
  using std::cos;
  using std::sin;
  const Scalar a = q(0);
  const Scalar b = q(0) + q(1);
  Vector2<Scalar> p;
  p << Scalar(leg.thigh_length) * sin(a) + Scalar(leg.shank_length) * sin(b),
      -Scalar(leg.thigh_length) * cos(a) - Scalar(leg.shank_length) * cos(b);
  return p;
}

/// d leg_chain / d q, columns (hip, knee).
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> leg_chain_jacobian(const LegGeometry& leg,
                                               const Vector2<Scalar>& q) {
  using std::cos;
  using std::sin;
  const Scalar a = q(0);
  const Scalar b = q(0) + q(1);
  const Scalar l1 = Scalar(leg.thigh_length);
  const Scalar l2 = Scalar(leg.shank_length);
  Eigen::Matrix<Scalar, 2, 2> J;
  J << l1 * cos(a) + l2 * cos(b), l2 * cos(b),
      l1 * sin(a) + l2 * sin(b), l2 * sin(b);
  return J;
}

template <typename Scalar>
Vector2<Scalar> forward_kinematics(const LegGeometry& leg,
                                   const Vector2<Scalar>& com,
                                   const Scalar& pitch,
                                   const Vector2<Scalar>& q) {
  const Vector2<Scalar> hip = leg.hip_offset_body.cast<Scalar>();
  return com + rotation(pitch) * (hip + leg_chain(leg, q));
}

/// Foot Jacobian with respect to [com_x, com_z, pitch, q_hip, q_knee].
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 5> foot_jacobian(const LegGeometry& leg,
                                          const Scalar& pitch,
                                          const Vector2<Scalar>& q) {
  const Vector2<Scalar> hip = leg.hip_offset_body.cast<Scalar>();
  Eigen::Matrix<Scalar, 2, 5> J;
  J.template block<2, 2>(0, 0).setIdentity();
  J.col(2) = rotation_derivative(pitch) * (hip + leg_chain(leg, q));
  J.template block<2, 2>(0, 3) = rotation(pitch) * leg_chain_jacobian(leg, q);
  return J;
}

/// Joint block of the foot Jacobian, d p_f / d q in the world frame.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> joint_jacobian(const LegGeometry& leg,
                                           const Scalar& pitch,
                                           const Vector2<Scalar>& q) {
  return rotation(pitch) * leg_chain_jacobian(leg, q);
}

/// Rows of the generalized coordinate that belong to the actuated joints.
inline Eigen::Matrix<double, 2, 5> selection_matrix() {
  Eigen::Matrix<double, 2, 5> S = Eigen::Matrix<double, 2, 5>::Zero();
  S(0, 3) = 1.0;
  S(1, 4) = 1.0;
  return S;
}

/// Spring torque on the knee, positive (extending) once the knee flexes past
/// the engagement angle and exactly zero on the other side.
template <typename Scalar>
Scalar ups_torque(const Scalar& q_knee, const UpsModel& ups) {
  if (!ups.enabled) return Scalar(0);
  const Scalar deflection = Scalar(ups.engagement_angle) - q_knee;
  return deflection > Scalar(0) ? Scalar(ups.stiffness) * deflection : Scalar(0);
}

/// d ups_torque / d q_knee; the one-sided value at engagement is taken from
/// the swing side.
inline double ups_torque_derivative(double q_knee, const UpsModel& ups) {
  if (!ups.enabled) return 0.0;
  return q_knee < ups.engagement_angle ? -ups.stiffness : 0.0;
}

/// Spring torque vector acting on (hip, knee).
inline Vec2 ups_torque_vector(const Vec2& q, const UpsModel& ups) {
  return Vec2(0.0, ups_torque(q(1), ups));
}

/// Motor torque that holds a massless stance leg against the ground reaction
/// force f (force of the ground on the robot): tau + tau_s = -S J^T f.
inline Vec2 stance_motor_torque(const Jacobian25& J, const Vec2& grf,
                                const Vec2& q, const UpsModel& ups) {
  return -(selection_matrix() * J.transpose() * grf) - ups_torque_vector(q, ups);
}

/// Inverse of stance_motor_torque through the joint block of the Jacobian.
inline Vec2 grf_from_motor_torque(const Mat2& joint_jac, const Vec2& tau,
                                  const Vec2& q, const UpsModel& ups) {
  const Vec2 total = tau + ups_torque_vector(q, ups);
  return -joint_jac.transpose().partialPivLu().solve(total);
}

struct IkResult {
  Vec2 q;
  bool clamped = false;  // target was moved onto the workspace boundary
};

/// Knee-backward inverse kinematics. Targets within 1e-9 m outside the full
/// extension radius are pulled onto the boundary; anything further throws
/// OutOfWorkspace.
Vec2 inverse_kinematics(const LegGeometry& leg, const Vec2& com, double pitch,
                        const Vec2& foot);

/// Same branch as inverse_kinematics, but unreachable targets are projected
/// onto the nearest reachable point instead of throwing.
IkResult inverse_kinematics_clamped(const LegGeometry& leg, const Vec2& com,
                                    double pitch, const Vec2& foot);

/// Validates the geometry against the template rest length.
void validate_geometry(const LegGeometry& leg, double rest_length);

}  // namespace hopper

#endif  // HOPPER_KINEMATICS_HPP_
