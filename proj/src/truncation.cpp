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

#include "tsa/truncation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace tsa {

Region Region::box(Vector lower, Vector upper) {
  require_dim(upper.size(), lower.size(), "box upper bound");
  require(lower.size() > 0, "box: empty bounds");
  require(!lower.hasNaN() && !upper.hasNaN(), "box: NaN bound");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    require(lower[i] <= upper[i], "box: lower bound exceeds upper bound");
  }
  return Region(Box{std::move(lower), std::move(upper)});
}

Region Region::interval(double lower, double upper) {
  return box(Vector::Constant(1, lower), Vector::Constant(1, upper));
}

Region Region::sphere(Vector center, double radius) {
  require(center.size() > 0, "sphere: empty center");
  require_finite(center, "sphere center");
  require(std::isfinite(radius) && radius > 0.0,
          "sphere: radius must be positive and finite");
  return Region(Sphere{std::move(center), radius});
}

std::string Region::kind() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, WholeSpace>) return "whole-space";
        if constexpr (std::is_same_v<T, Box>) return "box";
        if constexpr (std::is_same_v<T, Sphere>) return "sphere";
      },
      shape_);
}

std::optional<Eigen::Index> Region::dimension() const {
  if (const auto* b = std::get_if<Box>(&shape_)) return b->lower.size();
  if (const auto* s = std::get_if<Sphere>(&shape_)) return s->center.size();
  return std::nullopt;
}

bool Region::contains(const Vector& z, double tol) const {
  if (auto dim = dimension()) require_dim(z.size(), *dim, "membership test");
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return ((z - b->lower).array() >= -tol).all() &&
           ((b->upper - z).array() >= -tol).all();
  }
  if (const auto* s = std::get_if<Sphere>(&shape_)) {
    return (z - s->center).norm() <= s->radius + tol;
  }
  return true;
}

Vector Region::project(const Vector& z) const {
  require_finite(z, "projection input");
  if (auto dim = dimension()) require_dim(z.size(), *dim, "projection input");
  if (const auto* b = std::get_if<Box>(&shape_)) {
    return z.cwiseMax(b->lower).cwiseMin(b->upper);
  }
  if (const auto* s = std::get_if<Sphere>(&shape_)) {
    const Vector offset = z - s->center;
    const double dist = offset.norm();
    // Points within rounding distance of the boundary are kept as-is, so a
    // projected point projects to itself exactly. The center is interior,
    // hence dist > radius > 0 whenever we rescale.
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() *
                         (s->radius + s->center.norm());
    if (dist <= s->radius + slack) return z;
    return s->center + (s->radius / dist) * offset;
  }
  return z;
}

bool cnorm_condition(const Matrix& c, const Vector& center, double radius,
                     const Vector& root) {
  require_spd(c, "cnorm_condition matrix");
  require_dim(center.size(), c.rows(), "sphere center");
  require_dim(root.size(), c.rows(), "root");
  require(radius > 0.0 && std::isfinite(radius), "cnorm_condition: radius");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (c + c.transpose()),
                                            Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  return lmax * (center - root).squaredNorm() <= lmin * radius * radius;
}

std::string to_string(ScheduleFamily family) {
  switch (family) {
    case ScheduleFamily::kConstant: return "constant";
    case ScheduleFamily::kExpandingBox: return "expanding-box";
    case ScheduleFamily::kShrinkingSphere: return "shrinking-sphere";
    case ScheduleFamily::kCustom: return "custom";
  }
  return "custom";
}

TruncationSchedule::TruncationSchedule(ScheduleFamily family,
                                       Generator generator,
                                       bool needs_auxiliary)
    : family_(family),
      generator_(std::move(generator)),
      needs_auxiliary_(needs_auxiliary) {
  require(static_cast<bool>(generator_), "schedule: empty generator");
}

TruncationSchedule TruncationSchedule::constant(Region region) {
  return TruncationSchedule(
      ScheduleFamily::kConstant,
      [region = std::move(region)](StepIndex, const Vector*) { return region; });
}

TruncationSchedule TruncationSchedule::expanding_box(
    std::function<double(StepIndex)> u, Vector center) {
  require(static_cast<bool>(u), "expanding box: empty half-width");
  require_finite(center, "expanding box center");
  TruncationSchedule schedule(
      ScheduleFamily::kExpandingBox,
      [u, center](StepIndex t, const Vector*) {
        const double half = u(t);
        require(std::isfinite(half) && half >= 0.0,
                "expanding box: half-width must be finite and non-negative");
        return Region::box((center.array() - half).matrix(),
                           (center.array() + half).matrix());
      });
  schedule.half_width_ = std::move(u);
  return schedule;
}

TruncationSchedule TruncationSchedule::log_box(double scale, double shift,
                                               Vector center) {
  require(scale > 0.0, "log box: scale must be positive");
  require(shift >= 1.0, "log box: shift must be >= 1 so that u_1 > 0");
  return expanding_box(
      [scale, shift](StepIndex t) {
        return scale * std::log(static_cast<double>(t) + shift);
      },
      std::move(center));
}

TruncationSchedule TruncationSchedule::power_box(double scale, double r,
                                                 int degree, Vector center) {
  require(scale > 0.0, "power box: scale must be positive");
  require(r > 0.0, "power box: r must be positive");
  require(degree >= 1, "power box: polynomial degree must be >= 1");
  const double exponent = r / (2.0 * degree);
  return expanding_box(
      [scale, exponent](StepIndex t) {
        return scale * std::pow(static_cast<double>(t), exponent);
      },
      std::move(center));
}

TruncationSchedule TruncationSchedule::shrinking_sphere(double radius0,
                                                        double decay) {
  require(radius0 > 0.0 && std::isfinite(radius0),
          "shrinking sphere: initial radius");
  require(decay >= 0.0, "shrinking sphere: decay must be non-negative");
  return TruncationSchedule(
      ScheduleFamily::kShrinkingSphere,
      [radius0, decay](StepIndex t, const Vector* aux) {
        require(aux != nullptr, "shrinking sphere: auxiliary center missing");
        return Region::sphere(*aux,
                              radius0 * std::pow(static_cast<double>(t), -decay));
      },
      true);
}

Region TruncationSchedule::at(StepIndex t, const Vector* auxiliary) const {
  require(t >= 1, "schedule: step index must be >= 1");
  if (needs_auxiliary_ && auxiliary == nullptr) {
    throw DomainError("schedule " + to_string(family_) +
                      " requires an auxiliary input");
  }
  return generator_(t, auxiliary);
}

std::optional<StepIndex> admissibility_horizon(
    const TruncationSchedule& schedule, const Vector& root, StepIndex horizon,
    const AuxiliarySequence& auxiliary) {
  require(horizon >= 1, "admissibility horizon must be >= 1");
  if (schedule.needs_auxiliary() && !auxiliary) {
    throw DomainError("admissibility: schedule requires an auxiliary sequence");
  }
  std::optional<StepIndex> first;
  for (StepIndex t = horizon; t >= 1; --t) {
    Vector aux;
    if (auxiliary) aux = auxiliary(t);
    const Region region = schedule.at(t, auxiliary ? &aux : nullptr);
    if (!region.contains(root)) break;
    first = t;
  }
  return first;
}

}  // namespace tsa
