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
#include <queue>
#include <string>
#include <vector>

#include "tsa/core.hpp"
#include "tsa/engine.hpp"
#include "tsa/truncation.hpp"

namespace tsa {

enum class InnovationFamily { kNone, kGaussian, kStudent, kGaussianGrowing };

std::string to_string(InnovationFamily family);

// Innovation law of an AR model. kNone is the noiseless recursion used for
// deterministic checks.
struct Innovation {
  InnovationFamily family = InnovationFamily::kGaussian;
  double sigma = 1.0;   // gaussian sd, student scale
  double dof = 0.0;     // student only
  double growth = 0.0;  // variance sigma^2 * t^growth

  static Innovation none() { return {InnovationFamily::kNone, 0.0, 0.0, 0.0}; }
  static Innovation gaussian(double sigma) { return {InnovationFamily::kGaussian, sigma, 0.0, 0.0}; }
  static Innovation student(double dof, double scale) {
    return {InnovationFamily::kStudent, scale, dof, 0.0};
  }
  static Innovation gaussian_growing(double sigma, double growth) {
    return {InnovationFamily::kGaussianGrowing, sigma, 0.0, growth};
  }

  void validate() const;
  double variance(StepIndex t) const;
  double draw(StepIndex t, RandomStream& stream) const;
};

// X_t = theta' (X_{t-1}, ..., X_{t-m}) + xi_t
struct ARModel {
  Vector theta;
  Innovation innovation;
  // (X_0, X_{-1}, ..., X_{1-m}); zeros when empty.
  Vector presample;

  Eigen::Index order() const noexcept { return theta.size(); }
  void validate() const;
};

struct ARSeries {
  Vector presample;
  std::vector<double> values;  // X_1..X_T
  TerminalStatus status = TerminalStatus::kCompleted;
  StepIndex status_step = 0;

  StepIndex length() const noexcept { return static_cast<StepIndex>(values.size()); }
  double at(StepIndex t) const;  // t in [1 - m, T]
  // (X_{t-1}, ..., X_{t-m})
  Vector regressor(StepIndex t, Eigen::Index order) const;
};

ARSeries simulate_ar(const ARModel& model, StepIndex horizon, std::uint64_t seed,
                     double overflow_bound = 1e12);

struct EstimatorState {
  Vector theta;
  Matrix inv_info;
  StepIndex t = 0;

  static EstimatorState initial(Eigen::Index order);
  static EstimatorState initial(Vector theta0, Matrix inv_info0);
  void validate() const;
};

// Rank-one inverse update of I + weight * x x' given inv = I^-1:
//   inv - weight * inv x x' inv / (1 + weight * x' inv x), then symmetrized.
Matrix sherman_morrison(const Matrix& inv, const Vector& x, double weight = 1.0);

EstimatorState rls_step(const EstimatorState& state, const Vector& x_window, double x_new);

using ScoreFn = std::function<double(double)>;

// Likelihood step; score(u) = -g'(u)/g(u), fisher = integral (g'/g)^2 g.
EstimatorState rml_step(const EstimatorState& state, const Vector& x_window,
                        double x_new, const ScoreFn& score, double fisher);

// theta_t = Phi_{U_t}(theta_{t-1} + step_matrix x psi(residual)). The inverse
// information is left untouched; callers update it when step_matrix is I_t^-1.
EstimatorState robust_step(const EstimatorState& state, const Vector& x_window,
                           double x_new, const ScoreFn& psi, const Matrix& step_matrix,
                           const TruncationSchedule& schedule, StepIndex t,
                           const Vector* auxiliary = nullptr);

struct LinearProcedureSpec {
  std::function<Matrix(StepIndex)> gamma;
  std::function<Matrix(StepIndex)> beta;
  Vector root;
};

// z_prev + gamma_t (h_t - beta_t z_prev)
Vector linear_step(const Matrix& gamma, const Matrix& beta, const Vector& z_prev,
                   const Vector& h);
Vector linear_step(const LinearProcedureSpec& spec, StepIndex t, const Vector& z_prev,
                   const Vector& h);

// (gamma_curr^-1 - gamma_prev^-1) - 2 beta + beta gamma_curr beta, symmetrized.
Matrix g1_matrix(const Matrix& gamma_prev, const Matrix& gamma_curr, const Matrix& beta);

ScoreFn gaussian_score(double sigma);
double gaussian_fisher(double sigma);
// -g'/g for a scaled Student-t density.
ScoreFn student_score(double dof, double scale);
// integral of (g'/g)^2 g over the real line by adaptive quadrature.
double fisher_information_quadrature(const std::function<double(double)>& density,
                                     const std::function<double(double)>& score,
                                     double tolerance = 1e-10);
double student_fisher(double dof, double scale);
ScoreFn huber_psi(double clip);

// Running median of |residual|; scale() = 1.4826 * median, i.e. the MAD about
// zero, which is consistent for sigma under a centered Gaussian.
class RunningMad {
 public:
  void push(double residual);
  std::size_t count() const noexcept { return low_.size() + high_.size(); }
  double median() const;
  double scale() const { return 1.4826 * median(); }

 private:
  std::priority_queue<double> low_;
  std::priority_queue<double, std::vector<double>, std::greater<>> high_;
};

}  // namespace tsa
