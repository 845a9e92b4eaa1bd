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

#ifndef HOPPER_ENERGY_HPP_
#define HOPPER_ENERGY_HPP_

// Positive-power energy model and torque statistics. Only positive power is
// counted: the motors cannot be recharged by back-EMF.

#include <array>
#include <vector>

#include "hopper/types.hpp"

namespace hopper {

struct MotorModel {
  double torque_constant = 0.6;  // [N m/A], after the gearbox
  double resistance = 0.17;      // [ohm]

  void validate() const;
};

/// P+ = max(tau' qdot, 0) + |tau / Kt|^2 R.
double power_sample(const Vec2& tau, const Vec2& qdot, const MotorModel& motor);

/// Trapezoidal integration of sampled power plus travelled distance.
class EnergyAccumulator {
 public:
  /// Adds a sample at time t with CoM x position x. The first sample only
  /// sets the origin.
  void add(double t, double power, double x);

  double total_positive_energy() const { return energy_; }
  double distance() const { return distance_; }
  double duration() const { return duration_; }
  double rectangle_energy() const { return rectangle_; }
  bool empty() const { return !started_; }

 private:
  bool started_ = false;
  double t_ = 0.0;
  double p_ = 0.0;
  double x0_ = 0.0;
  double energy_ = 0.0;
  double rectangle_ = 0.0;  // left-point sum, for integrator checks
  double distance_ = 0.0;
  double duration_ = 0.0;
};

/// E+ / (m g d). Throws std::domain_error for a zero distance.
double cost_of_transport(const EnergyAccumulator& acc, double mass, double g);
double cost_of_transport(double energy, double distance, double mass, double g);

struct TorqueStats {
  double mean_abs = 0.0;
  double q1 = 0.0;      // quartiles of |tau|
  double median = 0.0;
  double q3 = 0.0;
  double peak = 0.0;
  std::size_t samples = 0;
};

struct TorqueSample {
  Vec2 tau = Vec2::Zero();
  bool stance = false;
};

/// Per-joint statistics of |tau| over stance samples. Throws
/// std::invalid_argument when there are none.
std::array<TorqueStats, 2> torque_stats(const std::vector<TorqueSample>& samples);

/// Linear-interpolation quantile of sorted data, p in [0, 1].
double quantile_sorted(const std::vector<double>& sorted, double p);

}  // namespace hopper

#endif  // HOPPER_ENERGY_HPP_
