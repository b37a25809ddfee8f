// Copyright 2026 The trunc-sa Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "tsa/core.hpp"

namespace tsa {

struct WholeSpace {};

struct Box {
  Vector lower;
  Vector upper;
};

struct Sphere {
  Vector center;
  double radius;
};

// Closed convex truncation region with an exact Euclidean projection.
class Region {
 public:
  using Shape = std::variant<WholeSpace, Box, Sphere>;

  Region() = default;

  static Region whole_space() { return Region(WholeSpace{}); }
  static Region box(Vector lower, Vector upper);
  static Region interval(double lower, double upper);
  static Region sphere(Vector center, double radius);

  const Shape& shape() const noexcept { return shape_; }
  std::string kind() const;
  // Absent for WholeSpace, which fits any dimension.
  std::optional<Eigen::Index> dimension() const;

  // Membership with an absolute slack on the constraint.
  bool contains(const Vector& z, double tol = 0.0) const;
  Vector project(const Vector& z) const;

 private:
  explicit Region(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_{WholeSpace{}};
};

inline Vector project(const Region& region, const Vector& z) {
  return region.project(z);
}

// Sufficient condition under which projecting onto the sphere
// S(center, radius) never increases the C-norm distance to `root`:
// lambda_max(C) * |center - root|^2 <= lambda_min(C) * radius^2.
bool cnorm_condition(const Matrix& c, const Vector& center, double radius,
                     const Vector& root);

enum class ScheduleFamily { kConstant, kExpandingBox, kShrinkingSphere, kCustom };

std::string to_string(ScheduleFamily family);

// Maps a step index (and, for data-driven families, an auxiliary vector
// observed at that step) to a truncation region.
class TruncationSchedule {
 public:
  using Generator = std::function<Region(StepIndex, const Vector*)>;

  TruncationSchedule() : TruncationSchedule(constant(Region::whole_space())) {}
  TruncationSchedule(ScheduleFamily family, Generator generator,
                     bool needs_auxiliary = false);

  static TruncationSchedule constant(Region region);
  // Box center + [-u_t, u_t]^m; u must be positive and non-decreasing.
  static TruncationSchedule expanding_box(std::function<double(StepIndex)> u,
                                          Vector center);
  // u_t = scale * log(t + shift)
  static TruncationSchedule log_box(double scale, double shift, Vector center);
  // u_t = scale * t^(r / (2 * degree))
  static TruncationSchedule power_box(double scale, double r, int degree,
                                      Vector center);
  // Sphere around the auxiliary vector with radius radius0 * t^(-decay).
  static TruncationSchedule shrinking_sphere(double radius0, double decay);

  Region at(StepIndex t, const Vector* auxiliary = nullptr) const;

  ScheduleFamily family() const noexcept { return family_; }
  bool needs_auxiliary() const noexcept { return needs_auxiliary_; }
  // Half-width u_t for the expanding-box family; empty otherwise.
  const std::function<double(StepIndex)>& half_width() const noexcept {
    return half_width_;
  }

 private:
  ScheduleFamily family_;
  Generator generator_;
  bool needs_auxiliary_ = false;
  std::function<double(StepIndex)> half_width_;
};

using AuxiliarySequence = std::function<Vector(StepIndex)>;

// Smallest t0 <= horizon such that root lies in U_t for every t in
// [t0, horizon]; empty when root is outside U_horizon.
std::optional<StepIndex> admissibility_horizon(
    const TruncationSchedule& schedule, const Vector& root, StepIndex horizon,
    const AuxiliarySequence& auxiliary = {});

}  // namespace tsa
