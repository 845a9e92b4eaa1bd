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
#include "hopper/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace hopper {
namespace {

using nlohmann::json;

// Reads keys out of one JSON object and remembers which were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(where() + "expected an object");
  }

  void num(const char* key, double& out) { read(key, out); }
  void integer(const char* key, int& out) { read(key, out); }
  void flag(const char* key, bool& out) { read(key, out); }
  void text(const char* key, std::string& out) { read(key, out); }

  template <int Rows>
  void vec(const char* key, Eigen::Matrix<double, Rows, 1>& out) {
    std::vector<double> v;
    read(key, v);
    if (!j_.contains(key)) return;
    if (static_cast<int>(v.size()) != Rows) {
      throw SchemaError(name(key) + ": expected " + std::to_string(Rows) + " numbers");
    }
    for (int i = 0; i < Rows; ++i) out(i) = v[i];
  }

  template <typename F>
  void object(const char* key, F&& body) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    Reader child(j_.at(key), name(key));
    body(child);
    child.finish();
  }

  template <typename T>
  bool array(const char* key, std::vector<T>& out) {
    if (!j_.contains(key)) return false;
    seen_.insert(key);
    const json& a = j_.at(key);
    if (!a.is_array()) throw SchemaError(name(key) + ": expected an array");
    out.clear();
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(element<T>(a[i], key, i));
    return true;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw SchemaError("unknown configuration key " + name(key.c_str()));
    }
  }

  static constexpr bool kWriting = false;

 private:
  template <typename T>
  T element(const json& e, const char* key, std::size_t i) const {
    if constexpr (std::is_same_v<T, VelocitySegment>) {
      VelocitySegment s;
      Reader r(e, name(key) + "[" + std::to_string(i) + "]");
      r.integer("hops", s.hops);
      r.num("speed", s.speed);
      r.finish();
      return s;
    } else {
      try {
        return e.get<T>();
      } catch (const json::exception&) {
        throw SchemaError(name(key) + "[" + std::to_string(i) + "]: wrong type");
      }
    }
  }

  template <typename T>
  void read(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    const json& v = j_.at(key);
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw SchemaError(name(key) + ": expected a number");
    } else if constexpr (std::is_same_v<T, int>) {
      if (!v.is_number_integer()) throw SchemaError(name(key) + ": expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw SchemaError(name(key) + ": expected true or false");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw SchemaError(name(key) + ": expected a string");
    } else {
      if (!v.is_array()) throw SchemaError(name(key) + ": expected an array");
      for (const json& e : v) {
        if (!e.is_number()) throw SchemaError(name(key) + ": expected numbers");
      }
    }
    out = v.get<T>();
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

class Writer {
 public:
  explicit Writer(json& j) : j_(j) { j_ = json::object(); }

  void num(const char* key, double& v) { j_[key] = v; }
  void integer(const char* key, int& v) { j_[key] = v; }
  void flag(const char* key, bool& v) { j_[key] = v; }
  void text(const char* key, std::string& v) { j_[key] = v; }
  template <int Rows>
  void vec(const char* key, Eigen::Matrix<double, Rows, 1>& v) {
    j_[key] = std::vector<double>(v.data(), v.data() + Rows);
  }
  template <typename F>
  void object(const char* key, F&& body) {
    Writer child(j_[key]);
    body(child);
  }
  template <typename T>
  bool array(const char* key, std::vector<T>& v) {
    json a = json::array();
    for (const T& e : v) {
      if constexpr (std::is_same_v<T, VelocitySegment>) {
        a.push_back({{"hops", e.hops}, {"speed", e.speed}});
      } else {
        a.push_back(e);
      }
    }
    j_[key] = a;
    return true;
  }

  static constexpr bool kWriting = true;

 private:
  json& j_;
};

template <typename V>
void visit_qp(V& v, SolverSettings& s) {
  v.num("eps_abs", s.eps_abs);
  v.num("eps_rel", s.eps_rel);
  v.integer("max_iter", s.max_iter);
  v.num("rho", s.rho);
  v.flag("adaptive_rho", s.adaptive_rho);
  v.flag("polish", s.polish);
}

template <typename V>
void visit_robot(V& v, RobotConstants& c) {
  v.num("mass", c.mass);
  v.num("inertia", c.inertia);
  v.num("k_s", c.k_s);
  v.num("r0", c.r0);
  v.num("mu", c.mu);
  v.vec("q_min", c.q_min);
  v.vec("q_max", c.q_max);
  v.vec("tau_max", c.tau_max);
  v.vec("gravity", c.gravity);
}

template <typename V>
void visit(V& v, ExperimentConfig& c) {
  RunSetup& s = c.setup;
  v.object("robot", [&](auto& b) { visit_robot(b, s.constants); });
  v.object("leg", [&](auto& b) {
    b.num("thigh_length", s.leg.thigh_length);
    b.num("shank_length", s.leg.shank_length);
    b.vec("hip_offset", s.leg.hip_offset_body);
  });
  v.object("ups", [&](auto& b) {
    b.num("stiffness", s.ups.stiffness);
    b.num("engagement_angle", s.ups.engagement_angle);
    b.flag("enabled", s.ups.enabled);
  });
  v.object("motor", [&](auto& b) {
    b.num("torque_constant", s.motor.torque_constant);
    b.num("resistance", s.motor.resistance);
  });
  v.object("plant", [&](auto& b) {
    b.num("dt", s.plant.dt);
    b.num("substep", s.plant.substep);
    b.num("rotor_inertia", s.plant.rotor_inertia);
    b.num("cone_load_floor", s.plant.cone_load_floor);
  });
  v.object("controller", [&](auto& b) {
    ControllerSettings& k = s.controller;
    b.num("tick", k.tick);
    b.num("horizon", k.horizon);
    b.integer("N", k.weights.N);
    b.num("gamma", k.weights.gamma);
    b.vec("Q", k.weights.Q);
    b.vec("R_f", k.weights.R_f);
    b.vec("R_tau", k.weights.R_tau);
    b.vec("K_p", k.pd.kp);
    b.vec("K_d", k.pd.kd);
    b.num("clearance", k.clearance);
    b.num("swing_settle", k.swing_settle);
    b.num("height_gain", k.height_gain);
    b.num("speed_trim_gain", k.speed_trim_gain);
    b.num("speed_trim_limit", k.speed_trim_limit);
    b.num("speed_trim_band", k.speed_trim_band);
    b.num("cone_margin", k.cone_margin);
    b.num("sketch_dt", k.sketch_dt);
    b.object("srb_qp", [&](auto& q) { visit_qp(q, k.srb_qp); });
    b.object("sqp", [&](auto& q) {
      q.integer("outer_iterations", k.sqp.outer_iterations);
      q.num("constraint_tolerance", k.sqp.constraint_tolerance);
      q.object("qp", [&](auto& qq) { visit_qp(qq, k.sqp.qp); });
    });
  });
  v.object("library", [&](auto& b) {
    b.num("speed_min", c.library.grid.min);
    b.num("speed_max", c.library.grid.max);
    b.num("speed_step", c.library.grid.step);
    b.num("nominal_height", c.library.nominal_height);
    b.num("tolerance", c.library.fixed_point.tolerance);
  });
  v.object("run", [&](auto& b) {
    b.array("profile", c.run.profile);
    b.num("start_height", c.run.start_height);
    b.num("start_speed", c.run.start_speed);
    b.num("height_jitter", c.run.height_jitter);
    b.num("speed_jitter", c.run.speed_jitter);
    b.num("max_time", c.run.max_time);
  });
  v.object("sweep", [&](auto& b) {
    b.object("velocity", [&](auto& a) {
      a.num("min", c.sweep.velocity.min);
      a.num("max", c.sweep.velocity.max);
      a.num("step", c.sweep.velocity.step);
    });
    b.object("stiffness", [&](auto& a) {
      a.num("min", c.sweep.stiffness.min);
      a.num("max", c.sweep.stiffness.max);
      a.integer("count", c.sweep.stiffness.count);
    });
    b.num("frequency_speed", c.sweep.frequency_speed);
    b.integer("hops", c.sweep.hops);
    b.integer("settle", c.sweep.settle);
    b.num("tolerance", c.sweep.tolerance);
    b.integer("lead_hops", c.sweep.lead_hops);
  });
  std::vector<std::uint64_t> seeds = c.seeds;
  if (v.array("seeds", seeds)) c.seeds = seeds;
  v.text("output_dir", c.output_dir);
  v.integer("jobs", c.jobs);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

std::vector<double> VelocityAxis::values() const {
  if (!positive(step) || !(max >= min)) throw SchemaError("sweep.velocity: need step > 0 and max >= min");
  const int n = static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(std::round((min + step * i) * 1e9) / 1e9);
  return out;
}

std::vector<double> StiffnessAxis::values() const {
  if (!positive(min) || !(max >= min) || count < 1) {
    throw SchemaError("sweep.stiffness: need 0 < min <= max and count >= 1");
  }
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double w = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
    out.push_back(min * std::pow(max / min, w));
  }
  return out;
}

void validate_constants(const RobotConstants& c, const LegGeometry& leg) {
  if (!positive(c.mass)) throw SchemaError("robot.mass must be positive");
  if (!positive(c.inertia)) throw SchemaError("robot.inertia must be positive");
  if (!positive(c.k_s)) throw SchemaError("robot.k_s must be positive");
  if (!positive(c.mu)) throw SchemaError("robot.mu must be positive");
  if (!positive(leg.thigh_length) || !positive(leg.shank_length)) {
    throw SchemaError("leg: link lengths must be positive");
  }
  if (!positive(c.r0)) throw SchemaError("robot.r0 must be positive");
  if (c.r0 >= leg.max_reach() || c.r0 <= leg.min_reach()) {
    throw SchemaError("robot.r0 = " + std::to_string(c.r0) + " m is outside the leg reach (" +
                      std::to_string(leg.min_reach()) + ", " + std::to_string(leg.max_reach()) +
                      ") m");
  }
  if (!c.q_min.allFinite() || !c.q_max.allFinite() || (c.q_min.array() >= c.q_max.array()).any()) {
    throw SchemaError("robot: q_min must lie below q_max");
  }
  if (!c.tau_max.allFinite() || (c.tau_max.array() <= 0.0).any()) {
    throw SchemaError("robot.tau_max must be positive");
  }
  if (c.gravity.x() != 0.0 || !(c.gravity.y() < 0.0) || !std::isfinite(c.gravity.y())) {
    throw SchemaError("robot.gravity must point straight down");
  }
}

RobotConstants validate_constants(const nlohmann::json& robot, const LegGeometry& leg) {
  RobotConstants c;
  Reader r(robot, "robot");
  visit_robot(r, c);
  r.finish();
  validate_constants(c, leg);
  return c;
}

void ExperimentConfig::validate() const {
  validate_constants(setup.constants, setup.leg);
  if (setup.ups.stiffness < 0.0 || !std::isfinite(setup.ups.engagement_angle)) {
    throw SchemaError("ups: stiffness must be non-negative");
  }
  setup.motor.validate();
  setup.plant.validate();
  setup.controller.validate();
  setup.controller.pd.validate();
  setup.controller.weights.validate();
  setup.controller.sqp.validate();
  setup.controller.srb_qp.validate();
  if (library.grid.count() < 1) throw SchemaError("library: empty speed grid");
  if (!positive(library.nominal_height) || !positive(library.fixed_point.tolerance)) {
    throw SchemaError("library: nominal_height and tolerance must be positive");
  }
  for (const VelocitySegment& s : run.profile) {
    if (s.hops < 0 || !std::isfinite(s.speed)) throw SchemaError("run.profile: hops must be non-negative");
  }
  if (!positive(run.start_height) || !positive(run.max_time) || run.height_jitter < 0.0 ||
      run.speed_jitter < 0.0) {
    throw SchemaError("run: start_height and max_time positive, jitters non-negative");
  }
  sweep.velocity.values();
  sweep.stiffness.values();
  if (sweep.hops < 1 || sweep.settle < 1 || !positive(sweep.tolerance) || sweep.lead_hops < 0) {
    throw SchemaError("sweep: hops and settle at least 1, tolerance positive");
  }
  if (seeds.empty()) throw SchemaError("seeds must not be empty");
  if (jobs < 1) throw SchemaError("jobs must be at least 1");
}

ExperimentConfig parse_config(const nlohmann::json& doc) {
  ExperimentConfig c;
  Reader r(doc, "");
  visit(r, c);
  r.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open configuration " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& config) {
  ExperimentConfig copy = config;
  json doc;
  Writer w(doc);
  visit(w, copy);
  return doc;
}

SlipParams slip_params(const RobotConstants& c) {
  SlipParams p;
  p.mass = c.mass;
  p.k_s = c.k_s;
  p.r0 = c.r0;
  p.g = c.g();
  return p;
}

}  // namespace hopper
