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

#ifndef HOPPER_GAIT_LIBRARY_HPP_
#define HOPPER_GAIT_LIBRARY_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hopper/slip.hpp"

namespace hopper {

using GainRow = Eigen::RowVector2d;

/// Periodic SLIP gait for one commanded speed plus its deadbeat gain.
struct GaitEntry {
  double speed = 0.0;
  ApexState apex;           // fixed-point apex
  double alpha = 0.0;       // fixed-point touchdown angle
  GainRow gain = GainRow::Zero();  // d alpha / d (height, velocity)
  double residual = 0.0;    // |apex - h(apex, alpha)|
};

/// Interpolated library lookup.
struct GaitTuple {
  double speed = 0.0;
  ApexState apex;
  double alpha = 0.0;
  GainRow gain = GainRow::Zero();
};

struct FixedPointGuess {
  double height = 0.45;
  double alpha = 0.0;
};

struct FixedPointSettings {
  int max_iterations = 100;
  double tolerance = 1e-6;   // acceptance bound on the final residual
  double target = 1e-11;     // iterate until below this or stalled
  double fd_step = 1e-6;
};

/// Fixed-point search that failed to reach the residual tolerance.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(double speed, double residual)
      : std::runtime_error("gait fixed point did not converge at speed " +
                           std::to_string(speed) + " m/s (residual " +
                           std::to_string(residual) + ")"),
        speed_(speed),
        residual_(residual) {}
  double speed() const { return speed_; }
  double residual() const { return residual_; }

 private:
  double speed_;
  double residual_;
};

/// Levenberg-Marquardt over (apex height, alpha) with the apex velocity
/// pinned to the target. The returned entry has no gain yet.
GaitEntry solve_fixed_point(double target_speed, const SlipParams& params,
                            const FixedPointGuess& guess,
                            const FixedPointSettings& settings = {});

/// Residual |apex - h(apex, alpha)| of a candidate fixed point; +inf when the
/// return map fails.
double fixed_point_residual(const ApexState& apex, double alpha, const SlipParams& params);

/// Least-squares deadbeat gain from central differences of the return map:
/// K = -(dh/dalpha)^+ dh/dx, so alpha = alpha* + K (x - x*) minimizes the
/// linearized next-apex error.
GainRow deadbeat_gain(const GaitEntry& entry, const SlipParams& params,
                      double fd_step = 1e-5);

/// Touchdown angle from the deadbeat law for a measured apex.
double deadbeat_alpha(const GaitTuple& tuple, const ApexState& measured);

struct SpeedGrid {
  double min = -3.0;
  double max = 3.0;
  double step = 0.1;

  int count() const;
  double at(int i) const { return min + step * i; }
};

struct GaitLibraryOptions {
  SpeedGrid grid;
  double nominal_height = 0.45;  // apex height seed for the zero-speed entry
  FixedPointSettings fixed_point;
};

class GaitLibrary {
 public:
  GaitLibrary() = default;
  GaitLibrary(SlipParams params, SpeedGrid grid, std::vector<GaitEntry> entries);

  /// Solves every grid speed, warm-starting outward from the entry nearest
  /// to zero. Throws NonConvergence naming the offending speed.
  static GaitLibrary build(const SlipParams& params, const GaitLibraryOptions& options = {});

  /// Piecewise-linear interpolation of every field; exact at grid nodes.
  /// Throws std::out_of_range outside the grid.
  GaitTuple query(double speed) const;

  const SlipParams& params() const { return params_; }
  const SpeedGrid& grid() const { return grid_; }
  const std::vector<GaitEntry>& entries() const { return entries_; }
  double max_residual() const;

  /// Hash of the template parameters recorded in the file header.
  static std::string params_hash(const SlipParams& params);

  void save(const std::filesystem::path& path) const;
  static GaitLibrary load(const std::filesystem::path& path);
  std::string to_text() const;
  static GaitLibrary from_text(const std::string& text);

 private:
  SlipParams params_;
  SpeedGrid grid_;
  std::vector<GaitEntry> entries_;
};

}  // namespace hopper

#endif  // HOPPER_GAIT_LIBRARY_HPP_
