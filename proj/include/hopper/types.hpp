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

#ifndef HOPPER_TYPES_HPP_
#define HOPPER_TYPES_HPP_

// Shared vocabulary for every layer of the controller stack.
//
// Frames: one world frame with x forward and z up. The torso frame is the
// world frame rotated by the pitch angle theta (counter-clockwise in the
// x-z plane, so positive pitch lifts the nose). The planar wedge product is
// r ^ f := r_x f_z - r_z f_x and yields the counter-clockwise moment.
//
// Joint angles: the hip angle is measured from the torso-frame downward
// vertical, positive forward; the knee angle is the shank angle relative to
// the thigh, negative when flexed.

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hopper {

using Vec2 = Eigen::Vector2d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;

/// Planar cross product, positive for counter-clockwise moments.
template <typename Scalar>
inline Scalar wedge(const Vector2<Scalar>& r, const Vector2<Scalar>& f) {
  return r.x() * f.y() - r.y() * f.x();
}

/// Counter-clockwise rotation in the x-z plane.
template <typename Scalar>
inline Eigen::Matrix<Scalar, 2, 2> rotation(const Scalar& angle) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> R;
  R << cos(angle), -sin(angle), sin(angle), cos(angle);
  return R;
}

/// Derivative of rotation() with respect to its angle.
template <typename Scalar>
inline Eigen::Matrix<Scalar, 2, 2> rotation_derivative(const Scalar& angle) {
  using std::cos;
  using std::sin;
  Eigen::Matrix<Scalar, 2, 2> dR;
  dR << -sin(angle), -cos(angle), cos(angle), -sin(angle);
  return dR;
}

/// Raised for configuration values that fail range or consistency checks.
class SchemaError : public std::runtime_error {
 public:
  explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

/// Full robot state shared by the plant, the controller and the logs.
struct RobotState {
  Vec2 p_c = Vec2::Zero();  // CoM position, world [m]
  Vec2 v_c = Vec2::Zero();  // CoM velocity, world [m/s]
  double theta = 0.0;       // torso pitch [rad]
  double theta_dot = 0.0;   // [rad/s]
  Vec2 q = Vec2::Zero();    // hip, knee [rad]
  Vec2 qdot = Vec2::Zero();
  bool contact = false;

  /// Torso part stacked as [p_c, theta, v_c, theta_dot].
  Vec6 torso() const {
    Vec6 x;
    x << p_c, theta, v_c, theta_dot;
    return x;
  }
  void set_torso(const Vec6& x) {
    p_c = x.head<2>();
    theta = x(2);
    v_c = x.segment<2>(3);
    theta_dot = x(5);
  }
  bool finite() const {
    return p_c.allFinite() && v_c.allFinite() && std::isfinite(theta) &&
           std::isfinite(theta_dot) && q.allFinite() && qdot.allFinite();
  }
};

/// Robot constants. Defaults are the nominal monoped values.
struct RobotConstants {
  double mass = 2.5;        // [kg]
  double inertia = 0.05;    // torso pitch inertia [kg m^2]
  double k_s = 1500.0;      // template leg stiffness [N/m]
  double r0 = 0.32;         // template rest length [m]
  double mu = 0.7;          // friction coefficient
  Vec2 q_min{0.0, -2.45};   // [rad]
  Vec2 q_max{std::numbers::pi / 2.0, -0.85};
  Vec2 tau_max{25.0, 25.0};  // [N m]
  Vec2 gravity{0.0, -9.81};  // [m/s^2]

  double g() const { return -gravity.y(); }
  double weight() const { return mass * g(); }
};

/// Width of the sanity box around the joint limits used for plant faults.
inline constexpr double kJointSanityMargin = 0.2;

}  // namespace hopper

#endif  // HOPPER_TYPES_HPP_
