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

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsa/core.hpp"
#include "tsa/random.hpp"
#include "tsa/truncation.hpp"

namespace tsa {

enum class StepFamily { kHarmonic, kPowerDecay, kMatrixRecursive, kCustom };

// Step-size sequence gamma_t(z). Scalar families are t^-eps * I; the matrix
// families delegate to a callable that must only use information available
// before step t.
class StepSizePolicy {
 public:
  using MatrixFn = std::function<Matrix(StepIndex, const Vector&)>;

  static StepSizePolicy harmonic();
  static StepSizePolicy power_decay(double exponent);
  static StepSizePolicy matrix_recursive(MatrixFn fn);
  static StepSizePolicy custom(MatrixFn fn);

  StepFamily family() const noexcept { return family_; }
  bool is_scalar() const noexcept {
    return family_ == StepFamily::kHarmonic || family_ == StepFamily::kPowerDecay;
  }
  double exponent() const noexcept { return exponent_; }

  // a_t = 1 / scalar gain; only for scalar families.
  double gain(StepIndex t) const;
  Matrix matrix(StepIndex t, const Vector& z) const;
  Vector apply(StepIndex t, const Vector& z, const Vector& direction) const;

 private:
  StepSizePolicy(StepFamily family, double exponent, MatrixFn fn)
      : family_(family), exponent_(exponent), fn_(std::move(fn)) {}

  StepFamily family_;
  double exponent_ = 1.0;
  MatrixFn fn_;
};

enum class FieldFamily { kLinear, kPolynomial, kCustom };

// Regression field R_t(z). When a root is declared, R_t(root) = 0 is checked
// on a probe set of steps at construction.
class RegressionField {
 public:
  using Fn = std::function<Vector(StepIndex, const Vector&)>;

  // R(z) = -slope * (z - root)
  static RegressionField linear(Vector root, double slope = 1.0);
  // R(z) = -slope_matrix * (z - root)
  static RegressionField linear(Vector root, Matrix slope_matrix);
  // One-dimensional R(z) = -sum_{i=1..l} c_i (z - root)^i.
  static RegressionField polynomial(std::vector<double> coefficients,
                                    double root);
  static RegressionField custom(Fn fn, Eigen::Index dim,
                                std::optional<Vector> root = std::nullopt);

  Vector operator()(StepIndex t, const Vector& z) const { return fn_(t, z); }

  FieldFamily family() const noexcept { return family_; }
  Eigen::Index dimension() const noexcept { return dim_; }
  const std::optional<Vector>& root() const noexcept { return root_; }
  const std::vector<double>& coefficients() const noexcept { return coefficients_; }

 private:
  RegressionField(FieldFamily family, Fn fn, Eigen::Index dim,
                  std::optional<Vector> root);

  FieldFamily family_;
  Fn fn_;
  Eigen::Index dim_;
  std::optional<Vector> root_;
  std::vector<double> coefficients_;
};

enum class NoiseFamily {
  kNone,
  kIidGaussian,
  kIidStudent,
  kStateScaled,
  kVarianceGrowth,
};

std::string to_string(NoiseFamily family);

// Centered measurement noise eps_t(z). Coordinates are independent; each
// step draws exactly `dimension` variates from the stream (none for kNone).
class NoiseField {
 public:
  static NoiseField none();
  static NoiseField gaussian(double sigma);
  static NoiseField student(double dof, double scale);
  // sigma * (1 + |z - root|) * N(0, I)
  static NoiseField state_scaled(double sigma, Vector root);
  // sigma * t^(exponent / 2) * N(0, I), so the variance grows like t^exponent.
  static NoiseField variance_growth(double sigma, double exponent);

  NoiseFamily family() const noexcept { return family_; }
  double sigma() const noexcept { return sigma_; }
  double dof() const noexcept { return dof_; }
  double exponent() const noexcept { return exponent_; }

  Vector sample(StepIndex t, const Vector& z, RandomStream& stream) const;
  // Conditional covariance Sigma_t(z).
  Matrix covariance(StepIndex t, const Vector& z) const;
  std::uint64_t draws_per_step(Eigen::Index dim) const {
    return family_ == NoiseFamily::kNone ? 0 : static_cast<std::uint64_t>(dim);
  }

 private:
  NoiseFamily family_ = NoiseFamily::kNone;
  double sigma_ = 0.0;
  double dof_ = 0.0;
  double exponent_ = 0.0;
  Vector root_;
};

struct SAProblem {
  Vector start;
  StepSizePolicy step = StepSizePolicy::harmonic();
  RegressionField field = RegressionField::linear(Vector::Zero(1));
  NoiseField noise = NoiseField::none();
  TruncationSchedule schedule;
  // Supplies the auxiliary center for data-driven schedules.
  AuxiliarySequence auxiliary;
  std::optional<Vector> root;
  double overflow_bound = 1e12;

  Eigen::Index dimension() const { return start.size(); }
  // Root declared on the problem, else on the field.
  std::optional<Vector> effective_root() const;
  void validate() const;
};

struct StepResult {
  Vector z;
  bool projected = false;
};

// Z_t = Phi_{U_t}(z_prev + gamma_t(z_prev) [R_t(z_prev) + eps_t(z_prev)]).
// Throws DivergedError when the update is non-finite or leaves the overflow
// bound, DomainError on malformed input.
StepResult sa_step_detailed(const SAProblem& problem, StepIndex t,
                            const Vector& z_prev, RandomStream& stream);

inline Vector sa_step(const SAProblem& problem, StepIndex t,
                      const Vector& z_prev, RandomStream& stream) {
  return sa_step_detailed(problem, t, z_prev, stream).z;
}

enum class TerminalStatus { kCompleted, kDiverged, kRejected };

std::string to_string(TerminalStatus status);

struct RecordOptions {
  // Record steps from, from + stride, ...; the final state is always kept.
  StepIndex from = 1;
  StepIndex stride = 1;
  bool states = true;
};

struct Trajectory {
  Eigen::Index dim = 0;
  std::vector<StepIndex> steps;
  // Row-major, dim values per recorded step; empty when states are off.
  std::vector<double> states;
  // |Z_t - root|^2 per recorded step when the root is known.
  std::vector<double> norm2;
  std::vector<std::uint8_t> projected;

  TerminalStatus status = TerminalStatus::kCompleted;
  StepIndex status_step = 0;
  std::string message;
  StepIndex completed_steps = 0;
  std::uint64_t draws = 0;
  Vector final_state;

  std::size_t size() const noexcept { return steps.size(); }
  Vector state(std::size_t i) const;
  bool completed() const noexcept { return status == TerminalStatus::kCompleted; }
};

Trajectory run(const SAProblem& problem, StepIndex horizon, std::uint64_t seed,
               const RecordOptions& options = {});

// Replication r is run(problem, horizon, derive_seed(base_seed, r)).
std::vector<Trajectory> replicate(const SAProblem& problem, StepIndex horizon,
                                  std::size_t n_reps, std::uint64_t base_seed,
                                  const RecordOptions& options = {},
                                  unsigned workers = 0);

}  // namespace tsa
