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

#include "hopper/gait_library.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace hopper {
namespace {

using Json = nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr double kFailedResidual = 1e3;

Eigen::Vector2d return_map_residual(double height, double alpha, double speed,
                                    const SlipParams& params) {
  const ReturnMapOutcome next = apex_return_map({height, speed}, alpha, params);
  if (!next) return Eigen::Vector2d::Constant(kFailedResidual);
  return Eigen::Vector2d(height - next.apex->height, speed - next.apex->velocity);
}

// Next apex as a 2-vector (height, velocity); throws on return-map failure.
Eigen::Vector2d next_apex(const ApexState& apex, double alpha, const SlipParams& params) {
  const ReturnMapOutcome next = apex_return_map(apex, alpha, params);
  if (!next) {
    throw std::runtime_error(std::string("return map failed: ") +
                             std::string(to_string(next.failure)));
  }
  return Eigen::Vector2d(next.apex->height, next.apex->velocity);
}

// Raibert-style seed for the touchdown angle at a given speed.
double alpha_seed(double speed, const SlipParams& params) {
  const double stance = std::numbers::pi * std::sqrt(params.mass / params.k_s);
  const double s = std::clamp(speed * stance / (2.0 * params.r0), -0.9, 0.9);
  return std::asin(s);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Json params_json(const SlipParams& p) {
  return Json{{"mass", p.mass}, {"k_s", p.k_s}, {"r0", p.r0}, {"g", p.g}};
}

}  // namespace

double fixed_point_residual(const ApexState& apex, double alpha, const SlipParams& params) {
  const ReturnMapOutcome next = apex_return_map(apex, alpha, params);
  if (!next) return std::numeric_limits<double>::infinity();
  return std::hypot(apex.height - next.apex->height, apex.velocity - next.apex->velocity);
}

GaitEntry solve_fixed_point(double target_speed, const SlipParams& params,
                            const FixedPointGuess& guess,
                            const FixedPointSettings& settings) {
  Eigen::Vector2d z(guess.height, guess.alpha);
  Eigen::Vector2d r = return_map_residual(z(0), z(1), target_speed, params);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  const double h = settings.fd_step;

  for (int iter = 0; iter < settings.max_iterations && std::sqrt(cost) > settings.target;
       ++iter) {
    Eigen::Matrix2d J;
    for (int j = 0; j < 2; ++j) {
      Eigen::Vector2d zp = z;
      Eigen::Vector2d zm = z;
      zp(j) += h;
      zm(j) -= h;
      J.col(j) = (return_map_residual(zp(0), zp(1), target_speed, params) -
                  return_map_residual(zm(0), zm(1), target_speed, params)) /
                 (2.0 * h);
    }
    const Eigen::Matrix2d JtJ = J.transpose() * J;
    const Eigen::Vector2d g = J.transpose() * r;
    bool improved = false;
    for (int tries = 0; tries < 12 && !improved; ++tries) {
      const Eigen::Matrix2d H = JtJ + lambda * Eigen::Matrix2d::Identity();
      const Eigen::Vector2d step = -H.ldlt().solve(g);
      const Eigen::Vector2d zn = z + step;
      const Eigen::Vector2d rn = return_map_residual(zn(0), zn(1), target_speed, params);
      const double cn = rn.squaredNorm();
      if (cn < cost) {
        z = zn;
        r = rn;
        cost = cn;
        lambda = std::max(lambda / 3.0, 1e-12);
        improved = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
  }

  const double residual = std::sqrt(cost);
  if (!(residual < settings.tolerance)) throw NonConvergence(target_speed, residual);
  GaitEntry entry;
  entry.speed = target_speed;
  entry.apex = {z(0), target_speed};
  entry.alpha = z(1);
  entry.residual = residual;
  return entry;
}

GainRow deadbeat_gain(const GaitEntry& entry, const SlipParams& params, double fd_step) {
  const ApexState x = entry.apex;
  Eigen::Matrix2d dh_dx;
  for (int j = 0; j < 2; ++j) {
    ApexState xp = x;
    ApexState xm = x;
    (j == 0 ? xp.height : xp.velocity) += fd_step;
    (j == 0 ? xm.height : xm.velocity) -= fd_step;
    dh_dx.col(j) = (next_apex(xp, entry.alpha, params) - next_apex(xm, entry.alpha, params)) /
                   (2.0 * fd_step);
  }
  const Eigen::Vector2d dh_da = (next_apex(x, entry.alpha + fd_step, params) -
                                 next_apex(x, entry.alpha - fd_step, params)) /
                                (2.0 * fd_step);
  const double nrm2 = dh_da.squaredNorm();
  if (std::sqrt(nrm2) < 1e-8) {
    throw std::runtime_error("deadbeat gain: return map insensitive to touchdown angle");
  }
  return -(dh_da.transpose() / nrm2) * dh_dx;
}

double deadbeat_alpha(const GaitTuple& tuple, const ApexState& measured) {
  return tuple.alpha + tuple.gain(0) * (measured.height - tuple.apex.height) +
         tuple.gain(1) * (measured.velocity - tuple.apex.velocity);
}

int SpeedGrid::count() const {
  if (!(step > 0.0) || max < min) throw SchemaError("speed grid: need step > 0 and max >= min");
  return static_cast<int>(std::floor((max - min) / step + 1e-9)) + 1;
}

GaitLibrary::GaitLibrary(SlipParams params, SpeedGrid grid, std::vector<GaitEntry> entries)
    : params_(params), grid_(grid), entries_(std::move(entries)) {}

GaitLibrary GaitLibrary::build(const SlipParams& params, const GaitLibraryOptions& options) {
  params.validate();
  const SpeedGrid& grid = options.grid;
  const int n = grid.count();
  std::vector<GaitEntry> entries(static_cast<std::size_t>(n));

  // Seed at the node closest to zero, then sweep outward in both directions
  // using the neighbouring solutions as warm starts.
  int seed = 0;
  for (int i = 1; i < n; ++i) {
    if (std::abs(grid.at(i)) < std::abs(grid.at(seed))) seed = i;
  }
  auto solve = [&](int i, const FixedPointGuess& guess) {
    GaitEntry e = solve_fixed_point(grid.at(i), params, guess, options.fixed_point);
    e.gain = deadbeat_gain(e, params);
    entries[static_cast<std::size_t>(i)] = e;
  };
  solve(seed, {options.nominal_height, alpha_seed(grid.at(seed), params)});
  for (int dir : {+1, -1}) {
    for (int i = seed + dir; i >= 0 && i < n; i += dir) {
      const GaitEntry& prev = entries[static_cast<std::size_t>(i - dir)];
      FixedPointGuess guess{options.nominal_height, prev.alpha};
      if (std::abs(i - seed) >= 2) {
        const GaitEntry& pp = entries[static_cast<std::size_t>(i - 2 * dir)];
        guess.alpha = 2.0 * prev.alpha - pp.alpha;
        guess.height = options.nominal_height;
      } else {
        guess.alpha = prev.alpha + (alpha_seed(grid.at(i), params) -
                                    alpha_seed(grid.at(i - dir), params));
      }
      solve(i, guess);
    }
  }
  return GaitLibrary(params, grid, std::move(entries));
}

GaitTuple GaitLibrary::query(double speed) const {
  if (entries_.empty()) throw std::out_of_range("gait library is empty");
  const double lo = entries_.front().speed;
  const double hi = entries_.back().speed;
  if (!(speed >= lo - 1e-12 && speed <= hi + 1e-12)) {
    throw std::out_of_range("speed " + std::to_string(speed) +
                            " m/s outside gait library range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + "]");
  }
  auto it = std::lower_bound(entries_.begin(), entries_.end(), speed,
                             [](const GaitEntry& e, double s) { return e.speed < s; });
  if (it == entries_.end()) it = std::prev(entries_.end());
  if (it->speed == speed || it == entries_.begin()) {
    return {speed, it->apex, it->alpha, it->gain};
  }
  const GaitEntry& b = *it;
  const GaitEntry& a = *std::prev(it);
  const double w = (speed - a.speed) / (b.speed - a.speed);
  if (w >= 1.0) return {speed, b.apex, b.alpha, b.gain};
  GaitTuple t;
  t.speed = speed;
  t.apex.height = (1.0 - w) * a.apex.height + w * b.apex.height;
  t.apex.velocity = (1.0 - w) * a.apex.velocity + w * b.apex.velocity;
  t.alpha = (1.0 - w) * a.alpha + w * b.alpha;
  t.gain = (1.0 - w) * a.gain + w * b.gain;
  return t;
}

double GaitLibrary::max_residual() const {
  double r = 0.0;
  for (const auto& e : entries_) r = std::max(r, e.residual);
  return r;
}

std::string GaitLibrary::params_hash(const SlipParams& params) {
  std::ostringstream os;
  os << std::hex << fnv1a(params_json(params).dump());
  return os.str();
}

std::string GaitLibrary::to_text() const {
  Json j;
  j["format"] = "hopper-gait-library";
  j["version"] = kFormatVersion;
  j["params"] = params_json(params_);
  j["params_hash"] = params_hash(params_);
  j["grid"] = {{"min", grid_.min}, {"max", grid_.max}, {"step", grid_.step},
               {"count", entries_.size()}};
  Json rows = Json::array();
  for (const auto& e : entries_) {
    rows.push_back({{"speed", e.speed},
                    {"apex_height", e.apex.height},
                    {"apex_velocity", e.apex.velocity},
                    {"alpha", e.alpha},
                    {"gain", {e.gain(0), e.gain(1)}},
                    {"residual", e.residual}});
  }
  j["entries"] = rows;
  return j.dump(1);
}

GaitLibrary GaitLibrary::from_text(const std::string& text) {
  const Json j = Json::parse(text);
  if (j.value("format", "") != "hopper-gait-library") {
    throw SchemaError("gait library: unrecognized format");
  }
  if (j.at("version").get<int>() != kFormatVersion) {
    throw SchemaError("gait library: unsupported version " + j.at("version").dump());
  }
  SlipParams p;
  p.mass = j.at("params").at("mass").get<double>();
  p.k_s = j.at("params").at("k_s").get<double>();
  p.r0 = j.at("params").at("r0").get<double>();
  p.g = j.at("params").at("g").get<double>();
  if (j.at("params_hash").get<std::string>() != params_hash(p)) {
    throw SchemaError("gait library: parameter hash mismatch");
  }
  SpeedGrid grid{j.at("grid").at("min").get<double>(), j.at("grid").at("max").get<double>(),
                 j.at("grid").at("step").get<double>()};
  std::vector<GaitEntry> entries;
  for (const auto& row : j.at("entries")) {
    GaitEntry e;
    e.speed = row.at("speed").get<double>();
    e.apex.height = row.at("apex_height").get<double>();
    e.apex.velocity = row.at("apex_velocity").get<double>();
    e.alpha = row.at("alpha").get<double>();
    e.gain << row.at("gain").at(0).get<double>(), row.at("gain").at(1).get<double>();
    e.residual = row.at("residual").get<double>();
    entries.push_back(e);
  }
  if (entries.size() != j.at("grid").at("count").get<std::size_t>()) {
    throw SchemaError("gait library: entry count does not match header");
  }
  return GaitLibrary(p, grid, std::move(entries));
}

void GaitLibrary::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_text() << '\n';
}

GaitLibrary GaitLibrary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace hopper
