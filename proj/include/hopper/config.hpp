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
#ifndef HOPPER_CONFIG_HPP_
#define HOPPER_CONFIG_HPP_

// Experiment configuration read from JSON. Every block is optional and
// defaults to the nominal monoped constants and controller parameters;
// unknown keys are rejected with their dotted path.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hopper/gait_library.hpp"
#include "hopper/simulation.hpp"

namespace hopper {

struct VelocityAxis {
  double min = 0.5;
  double max = 2.3;
  double step = 0.2;

  std::vector<double> values() const;
};

/// Log-spaced leg stiffness grid [N/m].
struct StiffnessAxis {
  double min = 1000.0;
  double max = 6000.0;
  int count = 8;

  std::vector<double> values() const;
};

struct SweepSettings {
  VelocityAxis velocity;
  StiffnessAxis stiffness;
  double frequency_speed = 1.0;  // commanded speed of the stiffness sweep [m/s]
  int hops = 10;                 // measured hops per point
  int settle = 3;                // consecutive apexes inside the band
  double tolerance = 0.1;        // [m/s]
  int lead_hops = 16;            // hops allowed before the window must open
};

struct ExperimentConfig {
  RunSetup setup;
  GaitLibraryOptions library;
  RunOptions run;
  SweepSettings sweep;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string output_dir = "out";
  int jobs = 1;

  void validate() const;
};

/// Range and consistency checks on the robot block; missing keys take the
/// defaults. Throws SchemaError.
RobotConstants validate_constants(const nlohmann::json& robot, const LegGeometry& leg = {});
void validate_constants(const RobotConstants& c, const LegGeometry& leg);

ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Complete document with every key; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

SlipParams slip_params(const RobotConstants& c);

}  // namespace hopper

#endif  // HOPPER_CONFIG_HPP_
