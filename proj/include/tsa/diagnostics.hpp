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
#include <span>
#include <string>
#include <vector>

#include "tsa/core.hpp"
#include "tsa/engine.hpp"
#include "tsa/truncation.hpp"

namespace tsa {

using ScalarSequence = std::function<double(StepIndex)>;

enum class LyapunovFamily { kConstant, kScaledIdentity, kInverseStep, kCustom };

// V_t(u) = u' C_t u with C_t symmetric positive definite for t >= 1.
// C_0 is evaluated from the same formula and may be singular (e.g. a_0 = 0).
class QuadraticLyapunov {
 public:
  using MatrixSequence = std::function<Matrix(StepIndex)>;

  static QuadraticLyapunov constant(Matrix c);
  // C_t = a_t^delta * I
  static QuadraticLyapunov scaled_identity(ScalarSequence a, double delta,
                                           Eigen::Index dim);
  // C_t = a_t^-1 * gamma_t(point)^-1
  static QuadraticLyapunov inverse_step(ScalarSequence a, StepSizePolicy step,
                                        Vector point);
  static QuadraticLyapunov custom(MatrixSequence fn);

  Matrix at(StepIndex t) const;
  double value(StepIndex t, const Vector& u) const;
  LyapunovFamily family() const noexcept { return family_; }

 private:
  QuadraticLyapunov(LyapunovFamily family, MatrixSequence fn)
      : family_(family), fn_(std::move(fn)) {}
  LyapunovFamily family_;
  MatrixSequence fn_;
};

// V_t(Z_t - root) for every recorded step of the trajectory.
std::vector<double> lyapunov_track(const Trajectory& trajectory,
                                   const QuadraticLyapunov& lyapunov,
                                   const Vector& root);

// Exact one-step conditional drift of a quadratic Lyapunov function:
//   u'(C_t - C_{t-1})u + 2u'C_t g R + (g R)'C_t(g R) + tr(g' C_t g Sigma)
// with g = gamma_t(root + u), R = R_t(root + u). Sigma defaults to the noise
// family's closed-form covariance.
double decrement_k(const SAProblem& problem, const QuadraticLyapunov& lyapunov,
                   const Vector& root, StepIndex t, const Vector& u,
                   const std::optional<Matrix>& noise_covariance = std::nullopt);

enum class DriftCondition { kD1, kH1, kH4, kW1, kB1, kY1 };

std::string to_string(DriftCondition condition);
DriftCondition parse_drift_condition(const std::string& name);

struct TimeRange {
  StepIndex first = 1;
  StepIndex last = 1;
  StepIndex stride = 1;
};

struct DriftOptions {
  // Step gains a_t (with a_0) for W1.
  ScalarSequence a;
  // Violations at t < t_min are listed but not counted.
  StepIndex t_min = 1;
  double y1_tolerance = 1e-3;
  AuxiliarySequence auxiliary;
};

struct DriftRow {
  DriftCondition condition;
  StepIndex t;
  Vector grid_point;
  double value;
  double threshold;
  bool ok;
};

struct DriftReport {
  std::vector<DriftRow> rows;
  std::size_t violations = 0;
  std::size_t early_violations = 0;
  std::size_t skipped = 0;
  bool passed() const noexcept { return violations == 0; }
};

// Evaluates the literal inequality of the condition at each (t, grid point).
// D1/H1/H4/W1 only probe points inside U_{t-1} (U_1 stands in for U_0).
DriftReport check_drift(const RegressionField& field,
                        const TruncationSchedule& schedule, const Vector& root,
                        DriftCondition condition,
                        const std::vector<Vector>& probe_grid,
                        const TimeRange& range, const DriftOptions& options = {});

// Squared errors |Z_t - z0|^2 at times first, first + stride, ...
struct ErrorSeries {
  StepIndex first = 1;
  StepIndex stride = 1;
  std::vector<double> err2;

  StepIndex time(std::size_t i) const {
    return first + static_cast<StepIndex>(i) * stride;
  }
  StepIndex last() const { return err2.empty() ? first - stride : time(err2.size() - 1); }

  // Requires a completed trajectory recorded on a regular grid.
  static ErrorSeries from_trajectory(const Trajectory& trajectory,
                                     const std::optional<Vector>& root = std::nullopt);
};

struct RateOptions {
  double tail_fraction = 0.5;
  // Nested boundedness windows as fractions of the horizon.
  double early_lo = 0.25;
  double early_hi = 0.5;
  double late_lo = 0.5;
  double late_hi = 1.0;
};

struct BoundednessStats {
  double delta = 0.0;
  StepIndex early_first = 0, early_last = 0, late_first = 0, late_last = 0;
  std::vector<double> early_sup;
  std::vector<double> late_sup;
  // late_sup / early_sup per replication.
  std::vector<double> ratio;
  double median_ratio = 0.0;
  double q10_ratio = 0.0;
  double q90_ratio = 0.0;
  double median_late_sup = 0.0;
};

struct RateReport {
  std::size_t replications = 0;
  StepIndex horizon = 0;
  StepIndex tail_first = 0;
  StepIndex tail_last = 0;
  // Least-squares slope of log(mean err2) on log t over the tail window.
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t fit_points = 0;
  std::size_t excluded_zero = 0;
  std::vector<double> rep_slopes;
  double median_rep_slope = 0.0;
  double q10_rep_slope = 0.0;
  double q90_rep_slope = 0.0;
  std::vector<BoundednessStats> boundedness;
};

RateReport rate_fit(std::span<const ErrorSeries> series,
                    const std::vector<double>& deltas,
                    const RateOptions& options = {});
RateReport rate_fit(std::span<const Trajectory> trajectories, const Vector& root,
                    const std::vector<double>& deltas,
                    const RateOptions& options = {});

// sum_{t=1..n} [(a_{t+1} - a_t - 1) / a_t]^+
double adt_partial_sum(const ScalarSequence& a, StepIndex n);

// Linear-interpolated sample quantile, q in [0, 1].
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

}  // namespace tsa
