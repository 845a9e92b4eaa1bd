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

#include "hopper/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hopper {

void MotorModel::validate() const {
  if (!(torque_constant > 0.0) || !(resistance > 0.0)) {
    throw SchemaError("motor: torque constant and resistance must be positive");
  }
}

double power_sample(const Vec2& tau, const Vec2& qdot, const MotorModel& motor) {
  const Vec2 current = tau / motor.torque_constant;
  return std::max(tau.dot(qdot), 0.0) + current.squaredNorm() * motor.resistance;
}

void EnergyAccumulator::add(double t, double power, double x) {
  if (!started_) {
    started_ = true;
    t_ = t;
    p_ = power;
    x0_ = x;
    return;
  }
  const double dt = t - t_;
  if (dt < 0.0) throw std::invalid_argument("energy samples must be time ordered");
  energy_ += 0.5 * (p_ + power) * dt;
  rectangle_ += p_ * dt;
  duration_ += dt;
  distance_ = std::abs(x - x0_);
  t_ = t;
  p_ = power;
}

double cost_of_transport(double energy, double distance, double mass, double g) {
  if (!(distance > 0.0)) throw std::domain_error("cost of transport needs a positive distance");
  return energy / (mass * g * distance);
}

double cost_of_transport(const EnergyAccumulator& acc, double mass, double g) {
  return cost_of_transport(acc.total_positive_energy(), acc.distance(), mass, g);
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

std::array<TorqueStats, 2> torque_stats(const std::vector<TorqueSample>& samples) {
  std::array<std::vector<double>, 2> mag;
  for (const TorqueSample& s : samples) {
    if (!s.stance) continue;
    for (int j = 0; j < 2; ++j) mag[j].push_back(std::abs(s.tau(j)));
  }
  if (mag[0].empty()) throw std::invalid_argument("torque statistics need stance samples");
  std::array<TorqueStats, 2> out;
  for (int j = 0; j < 2; ++j) {
    std::vector<double>& v = mag[j];
    std::sort(v.begin(), v.end());
    TorqueStats& s = out[j];
    s.samples = v.size();
    s.mean_abs = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    s.q1 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q3 = quantile_sorted(v, 0.75);
    s.peak = v.back();
  }
  return out;
}

}  // namespace hopper
