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

#include "tsa/estimators.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

namespace tsa {

std::string to_string(InnovationFamily family) {
  switch (family) {
    case InnovationFamily::kNone: return "none";
    case InnovationFamily::kGaussian: return "gaussian";
    case InnovationFamily::kStudent: return "student";
    case InnovationFamily::kGaussianGrowing: return "gaussian-growing";
  }
  return "none";
}

void Innovation::validate() const {
  switch (family) {
    case InnovationFamily::kNone:
      return;
    case InnovationFamily::kGaussian:
      require(sigma > 0.0 && std::isfinite(sigma), "gaussian innovation: sigma must be positive");
      return;
    case InnovationFamily::kStudent:
      require(sigma > 0.0 && std::isfinite(sigma), "student innovation: scale must be positive");
      require(dof > 2.0 && std::isfinite(dof), "student innovation: dof must exceed 2");
      return;
    case InnovationFamily::kGaussianGrowing:
      require(sigma > 0.0 && std::isfinite(sigma), "growing innovation: sigma must be positive");
      require(growth >= 0.0 && growth < 1.0, "growing innovation: exponent must lie in [0, 1)");
      return;
  }
}

double Innovation::variance(StepIndex t) const {
  switch (family) {
    case InnovationFamily::kNone: return 0.0;
    case InnovationFamily::kGaussian: return sigma * sigma;
    case InnovationFamily::kStudent: return sigma * sigma * dof / (dof - 2.0);
    case InnovationFamily::kGaussianGrowing:
      return sigma * sigma * std::pow(static_cast<double>(t), growth);
  }
  return 0.0;
}

double Innovation::draw(StepIndex t, RandomStream& stream) const {
  switch (family) {
    case InnovationFamily::kNone: return 0.0;
    case InnovationFamily::kGaussian: return sigma * stream.normal();
    case InnovationFamily::kStudent: return sigma * stream.student_t(dof);
    case InnovationFamily::kGaussianGrowing:
      return sigma * std::pow(static_cast<double>(t), 0.5 * growth) * stream.normal();
  }
  return 0.0;
}

void ARModel::validate() const {
  require(order() >= 1, "AR model: order must be >= 1");
  require_finite(theta, "AR coefficients");
  if (presample.size() != 0) {
    require_dim(presample.size(), order(), "AR presample");
    require_finite(presample, "AR presample");
  }
  innovation.validate();
}

double ARSeries::at(StepIndex t) const {
  if (t >= 1) {
    require(t <= length(), "AR series: index beyond the simulated horizon");
    return values[static_cast<std::size_t>(t - 1)];
  }
  const StepIndex back = -t;  // X_0 is presample[0]
  require(back < presample.size(), "AR series: index before the presample");
  return presample[back];
}

Vector ARSeries::regressor(StepIndex t, Eigen::Index order) const {
  Vector x(order);
  for (Eigen::Index k = 0; k < order; ++k) x[k] = at(t - 1 - k);
  return x;
}

ARSeries simulate_ar(const ARModel& model, StepIndex horizon, std::uint64_t seed,
                     double overflow_bound) {
  model.validate();
  require(horizon >= 1, "simulate_ar: horizon must be >= 1");
  const Eigen::Index m = model.order();
  ARSeries series;
  series.presample = model.presample.size() == 0 ? Vector::Zero(m) : model.presample;
  series.values.reserve(static_cast<std::size_t>(horizon));
  RandomStream stream(seed);
  // Window holds (X_{t-1}, ..., X_{t-m}).
  Vector window = series.presample;
  for (StepIndex t = 1; t <= horizon; ++t) {
    const double x = model.theta.dot(window) + model.innovation.draw(t, stream);
    if (!std::isfinite(x) || std::abs(x) > overflow_bound) {
      series.status = TerminalStatus::kDiverged;
      series.status_step = t;
      break;
    }
    series.values.push_back(x);
    for (Eigen::Index k = m - 1; k > 0; --k) window[k] = window[k - 1];
    window[0] = x;
  }
  return series;
}

EstimatorState EstimatorState::initial(Eigen::Index order) {
  require(order >= 1, "estimator: order must be >= 1");
  return initial(Vector::Zero(order), Matrix::Identity(order, order));
}

EstimatorState EstimatorState::initial(Vector theta0, Matrix inv_info0) {
  EstimatorState s{std::move(theta0), std::move(inv_info0), 0};
  s.validate();
  return s;
}

void EstimatorState::validate() const {
  require(theta.size() >= 1, "estimator: empty parameter vector");
  require_finite(theta, "estimator parameter");
  require(inv_info.rows() == theta.size() && inv_info.cols() == theta.size(),
          "estimator: inverse information shape");
  require_spd(inv_info, "estimator inverse information");
}

Matrix sherman_morrison(const Matrix& inv, const Vector& x, double weight) {
  require_dim(x.size(), inv.rows(), "Sherman-Morrison vector");
  const Vector ix = inv * x;
  Matrix out = inv - (weight / (1.0 + weight * x.dot(ix))) * (ix * ix.transpose());
  return 0.5 * (out + out.transpose());
}

namespace {

void check_window(const EstimatorState& state, const Vector& x_window, double x_new) {
  require_dim(x_window.size(), state.theta.size(), "regressor window");
  require_finite(x_window, "regressor window");
  require(std::isfinite(x_new), "observation must be finite");
}

}  // namespace

EstimatorState rls_step(const EstimatorState& state, const Vector& x_window, double x_new) {
  check_window(state, x_window, x_new);
  EstimatorState next;
  next.inv_info = sherman_morrison(state.inv_info, x_window);
  const double residual = x_new - x_window.dot(state.theta);
  next.theta = state.theta + next.inv_info * x_window * residual;
  next.t = state.t + 1;
  return next;
}

EstimatorState rml_step(const EstimatorState& state, const Vector& x_window,
                        double x_new, const ScoreFn& score, double fisher) {
  check_window(state, x_window, x_new);
  require(fisher > 0.0 && std::isfinite(fisher), "rml_step: Fisher information must be positive");
  require(static_cast<bool>(score), "rml_step: empty score");
  EstimatorState next;
  next.inv_info = sherman_morrison(state.inv_info, x_window, fisher);
  const double residual = x_new - x_window.dot(state.theta);
  next.theta = state.theta + next.inv_info * x_window * score(residual);
  next.t = state.t + 1;
  return next;
}

EstimatorState robust_step(const EstimatorState& state, const Vector& x_window,
                           double x_new, const ScoreFn& psi, const Matrix& step_matrix,
                           const TruncationSchedule& schedule, StepIndex t,
                           const Vector* auxiliary) {
  check_window(state, x_window, x_new);
  require(static_cast<bool>(psi), "robust_step: empty psi");
  require(step_matrix.rows() == state.theta.size() && step_matrix.cols() == state.theta.size(),
          "robust_step: step matrix shape");
  const double residual = x_new - x_window.dot(state.theta);
  const Vector update = state.theta + step_matrix * x_window * psi(residual);
  if (!update.allFinite()) throw DivergedError(t, "robust_step: non-finite update");
  EstimatorState next;
  next.theta = schedule.at(t, auxiliary).project(update);
  next.inv_info = state.inv_info;
  next.t = state.t + 1;
  return next;
}

Vector linear_step(const Matrix& gamma, const Matrix& beta, const Vector& z_prev,
                   const Vector& h) {
  const Eigen::Index m = z_prev.size();
  require(gamma.rows() == m && gamma.cols() == m, "linear_step: gamma shape");
  require(beta.rows() == m && beta.cols() == m, "linear_step: beta shape");
  require_dim(h.size(), m, "linear_step: h");
  return z_prev + gamma * (h - beta * z_prev);
}

Vector linear_step(const LinearProcedureSpec& spec, StepIndex t, const Vector& z_prev,
                   const Vector& h) {
  require(static_cast<bool>(spec.gamma) && static_cast<bool>(spec.beta),
          "linear_step: incomplete specification");
  return linear_step(spec.gamma(t), spec.beta(t), z_prev, h);
}

namespace {

Matrix spd_inverse(const Matrix& m, const char* what) {
  require(m.rows() == m.cols() && m.rows() >= 1, std::string(what) + ": not square");
  Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
  if (llt.info() != Eigen::Success) throw DomainError(std::string(what) + ": singular or not SPD");
  return llt.solve(Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace

Matrix g1_matrix(const Matrix& gamma_prev, const Matrix& gamma_curr, const Matrix& beta) {
  require(gamma_prev.rows() == gamma_curr.rows() && gamma_prev.cols() == gamma_curr.cols(),
          "g1_matrix: gamma shapes differ");
  require(beta.rows() == gamma_curr.rows() && beta.cols() == gamma_curr.cols(),
          "g1_matrix: beta shape");
  const Matrix d_inv = spd_inverse(gamma_curr, "gamma_t") - spd_inverse(gamma_prev, "gamma_{t-1}");
  Matrix g = d_inv - 2.0 * beta + beta * gamma_curr * beta;
  return 0.5 * (g + g.transpose());
}

ScoreFn gaussian_score(double sigma) {
  require(sigma > 0.0, "gaussian score: sigma must be positive");
  const double inv_var = 1.0 / (sigma * sigma);
  return [inv_var](double u) { return u * inv_var; };
}

double gaussian_fisher(double sigma) {
  require(sigma > 0.0, "gaussian Fisher information: sigma must be positive");
  return 1.0 / (sigma * sigma);
}

ScoreFn student_score(double dof, double scale) {
  require(dof > 0.0 && scale > 0.0, "student score: parameters must be positive");
  const double s2 = scale * scale;
  return [dof, s2](double u) { return (dof + 1.0) * u / (dof * s2 + u * u); };
}

double fisher_information_quadrature(const std::function<double(double)>& density,
                                     const std::function<double(double)>& score,
                                     double tolerance) {
  boost::math::quadrature::sinh_sinh<double> integrator;
  const double value = integrator.integrate(
      [&](double u) {
        const double g = density(u);
        if (g == 0.0) return 0.0;
        const double s = score(u);
        return s * s * g;
      },
      tolerance);
  require(std::isfinite(value) && value > 0.0, "Fisher information quadrature failed");
  return value;
}

double student_fisher(double dof, double scale) {
  require(dof > 0.0 && scale > 0.0, "student Fisher information: parameters must be positive");
  const boost::math::students_t_distribution<double> dist(dof);
  return fisher_information_quadrature(
      [&](double u) { return boost::math::pdf(dist, u / scale) / scale; },
      student_score(dof, scale));
}

ScoreFn huber_psi(double clip) {
  require(clip > 0.0, "huber psi: clip must be positive");
  return [clip](double u) { return std::clamp(u, -clip, clip); };
}

void RunningMad::push(double residual) {
  const double a = std::abs(residual);
  if (low_.empty() || a <= low_.top()) low_.push(a);
  else high_.push(a);
  if (low_.size() > high_.size() + 1) {
    high_.push(low_.top());
    low_.pop();
  } else if (high_.size() > low_.size()) {
    low_.push(high_.top());
    high_.pop();
  }
}

double RunningMad::median() const {
  if (low_.empty()) return 0.0;
  if (low_.size() > high_.size()) return low_.top();
  return 0.5 * (low_.top() + high_.top());
}

}  // namespace tsa
