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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "hopper/config.hpp"

namespace hopper {
namespace {

using nlohmann::json;

std::string schema_message(const json& doc) {
  try {
    parse_config(doc);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyDocumentGivesTheTableValues) {
  const ExperimentConfig c = parse_config(json::object());
  const RobotConstants& r = c.setup.constants;
  EXPECT_EQ(r.mass, 2.5);
  EXPECT_EQ(r.inertia, 0.05);
  EXPECT_EQ(r.k_s, 1500.0);
  EXPECT_EQ(r.r0, 0.32);
  EXPECT_EQ(r.mu, 0.7);
  EXPECT_EQ(r.q_min, Vec2(0.0, -2.45));
  EXPECT_EQ(r.q_max, Vec2(std::numbers::pi / 2.0, -0.85));
  EXPECT_EQ(r.tau_max, Vec2(25.0, 25.0));
  EXPECT_EQ(r.gravity, Vec2(0.0, -9.81));

  const ControllerSettings& k = c.setup.controller;
  EXPECT_EQ(k.pd.kp, Vec2(40.0, 40.0));
  EXPECT_EQ(k.pd.kd, Vec2(0.5, 0.5));
  Vec6 q;
  q << 10.0, 10.0, 1.0, 1.0, 0.0, 0.1;
  EXPECT_EQ(k.weights.Q, q);
  EXPECT_EQ(k.weights.R_f, Vec2(1e-5, 1e-5));
  EXPECT_EQ(k.weights.R_tau, Vec2(1e-5, 1e-5));
}

TEST(Config, EmptyRobotBlockGivesTheTableValues) {
  const RobotConstants r = validate_constants(json::object());
  const RobotConstants d;
  EXPECT_EQ(r.mass, d.mass);
  EXPECT_EQ(r.r0, d.r0);
  EXPECT_EQ(r.mu, d.mu);
  EXPECT_EQ(r.q_max, d.q_max);
}

TEST(Config, RestLengthBeyondReachIsRejected) {
  EXPECT_THROW(validate_constants(json{{"r0", 0.5}}), SchemaError);
  const std::string msg = schema_message(json{{"robot", {{"r0", 0.5}}}});
  EXPECT_NE(msg.find("r0"), std::string::npos) << msg;
  EXPECT_NE(msg.find("reach"), std::string::npos) << msg;
  // Longer links make the same rest length valid.
  const ExperimentConfig c =
      parse_config(json{{"robot", {{"r0", 0.5}}}, {"leg", {{"thigh_length", 0.3}, {"shank_length", 0.3}}}});
  EXPECT_EQ(c.setup.constants.r0, 0.5);
}

TEST(Config, NegativeFrictionIsRejected) {
  EXPECT_THROW(validate_constants(json{{"mu", -0.1}}), SchemaError);
  EXPECT_NE(schema_message(json{{"robot", {{"mu", -0.1}}}}).find("mu"), std::string::npos);
}

TEST(Config, RangeChecks) {
  EXPECT_THROW(validate_constants(json{{"mass", 0.0}}), SchemaError);
  EXPECT_THROW(validate_constants(json{{"q_min", {0.0, -0.5}}}), SchemaError);
  EXPECT_THROW(validate_constants(json{{"tau_max", {25.0, -1.0}}}), SchemaError);
  EXPECT_THROW(validate_constants(json{{"gravity", {0.0, 9.81}}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"jobs", 0}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"seeds", json::array()}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"run", {{"profile", {{{"hops", -1}, {"speed", 1.0}}}}}}}),
               SchemaError);
}

TEST(Config, UnknownKeysNameTheirPath) {
  EXPECT_NE(schema_message(json{{"robto", json::object()}}).find("robto"), std::string::npos);
  const std::string msg =
      schema_message(json{{"controller", {{"sqp", {{"qp", {{"bogus", 1}}}}}}}});
  EXPECT_NE(msg.find("controller.sqp.qp.bogus"), std::string::npos) << msg;
  EXPECT_NE(schema_message(json{{"robot", {{"height", 1.0}}}}).find("robot.height"),
            std::string::npos);
}

TEST(Config, WrongTypesAreRejected) {
  EXPECT_THROW(parse_config(json{{"robot", {{"mass", "heavy"}}}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"robot", {{"q_min", {0.0}}}}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"robot", 3}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"jobs", 1.5}}), SchemaError);
  EXPECT_THROW(parse_config(json{{"ups", {{"enabled", 1}}}}), SchemaError);
  EXPECT_THROW(parse_config(json::array()), SchemaError);
}

TEST(Config, OverridesApply) {
  const ExperimentConfig c = parse_config(json{
      {"robot", {{"k_s", 2500.0}}},
      {"controller", {{"N", 12}, {"sqp", {{"outer_iterations", 3}}}}},
      {"run", {{"profile", {{{"hops", 4}, {"speed", 0.0}}, {{"hops", 6}, {"speed", 1.5}}}}}},
      {"seeds", {7, 8}},
      {"output_dir", "elsewhere"}});
  EXPECT_EQ(c.setup.constants.k_s, 2500.0);
  EXPECT_EQ(c.setup.controller.weights.N, 12);
  EXPECT_EQ(c.setup.controller.sqp.outer_iterations, 3);
  ASSERT_EQ(c.run.profile.size(), 2u);
  EXPECT_EQ(c.run.profile[1].hops, 6);
  EXPECT_EQ(c.run.profile[1].speed, 1.5);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{7, 8}));
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.setup.constants.mass, 2.5);
}

TEST(Config, JsonRoundTripIsExact) {
  ExperimentConfig c = parse_config(json{{"robot", {{"k_s", 1234.5678901234}}},
                                         {"controller", {{"gamma", 0.9}}},
                                         {"sweep", {{"stiffness", {{"count", 5}}}}}});
  const json once = to_json(c);
  const ExperimentConfig back = parse_config(once);
  EXPECT_EQ(to_json(back), once);
  EXPECT_EQ(back.setup.constants.k_s, 1234.5678901234);
  EXPECT_EQ(back.sweep.stiffness.count, 5);
  // Every key of the full document is accepted.
  EXPECT_EQ(to_json(parse_config(to_json(ExperimentConfig{}))), to_json(ExperimentConfig{}));
}

TEST(Config, LoadsFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "hopper_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"robot": {"mu": 0.9}, "jobs": 2})";
  }
  const ExperimentConfig c = load_config(path);
  EXPECT_EQ(c.setup.constants.mu, 0.9);
  EXPECT_EQ(c.jobs, 2);
  {
    std::ofstream out(path);
    out << "{ not json";
  }
  EXPECT_THROW(load_config(path), SchemaError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), SchemaError);
}

TEST(SweepAxes, VelocityGrid) {
  const std::vector<double> v = VelocityAxis{}.values();
  ASSERT_EQ(v.size(), 10u);
  for (int i = 0; i < 10; ++i) EXPECT_NEAR(v[i], 0.5 + 0.2 * i, 1e-12);
  EXPECT_EQ(v.back(), 2.3);
  EXPECT_THROW((VelocityAxis{1.0, 0.5, 0.1}.values()), SchemaError);
}

TEST(SweepAxes, StiffnessGridIsLogSpaced) {
  const std::vector<double> k = StiffnessAxis{}.values();
  ASSERT_EQ(k.size(), 8u);
  for (int i = 0; i < 8; ++i) {
    const double expected = 1000.0 * std::exp(std::log(6.0) * i / 7.0);
    EXPECT_NEAR(k[i], expected, 1e-9 * expected) << i;
  }
  for (int i = 1; i < 7; ++i) EXPECT_NEAR(k[i] * k[i], k[i - 1] * k[i + 1], 1e-6);
  EXPECT_EQ((StiffnessAxis{1500.0, 1500.0, 1}.values()), std::vector<double>{1500.0});
}

TEST(Config, SlipParamsFollowTheConstants) {
  RobotConstants c;
  c.gravity = Vec2(0.0, -9.5);
  const SlipParams p = slip_params(c);
  EXPECT_EQ(p.mass, c.mass);
  EXPECT_EQ(p.k_s, c.k_s);
  EXPECT_EQ(p.r0, c.r0);
  EXPECT_EQ(p.g, 9.5);
}

}  // namespace
}  // namespace hopper
