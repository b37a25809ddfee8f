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

#include "tsa/engine.hpp"

#include <cmath>

#include "tsa/parallel.hpp"

namespace tsa {

StepSizePolicy StepSizePolicy::harmonic() {
  return StepSizePolicy(StepFamily::kHarmonic, 1.0, nullptr);
}

StepSizePolicy StepSizePolicy::power_decay(double exponent) {
  require(exponent > 0.5 && exponent <= 1.0,
          "power-decay step exponent must lie in (1/2, 1]");
  return StepSizePolicy(StepFamily::kPowerDecay, exponent, nullptr);
}

StepSizePolicy StepSizePolicy::matrix_recursive(MatrixFn fn) {
  require(static_cast<bool>(fn), "matrix-recursive step: empty callable");
  return StepSizePolicy(StepFamily::kMatrixRecursive, 0.0, std::move(fn));
}

StepSizePolicy StepSizePolicy::custom(MatrixFn fn) {
  require(static_cast<bool>(fn), "custom step: empty callable");
  return StepSizePolicy(StepFamily::kCustom, 0.0, std::move(fn));
}

double StepSizePolicy::gain(StepIndex t) const {
  if (!is_scalar()) throw UnsupportedError("gain() is defined for scalar step families only");
  require(t >= 1, "step index must be >= 1");
  return family_ == StepFamily::kHarmonic ? static_cast<double>(t)
                                          : std::pow(static_cast<double>(t), exponent_);
}

Matrix StepSizePolicy::matrix(StepIndex t, const Vector& z) const {
  if (is_scalar()) return Matrix::Identity(z.size(), z.size()) / gain(t);
  Matrix g = fn_(t, z);
  require(g.rows() == z.size() && g.cols() == z.size(),
          "step-size matrix has the wrong shape");
  return g;
}

Vector StepSizePolicy::apply(StepIndex t, const Vector& z,
                             const Vector& direction) const {
  if (is_scalar()) return direction / gain(t);
  return matrix(t, z) * direction;
}

RegressionField::RegressionField(FieldFamily family, Fn fn, Eigen::Index dim,
                                 std::optional<Vector> root)
    : family_(family), fn_(std::move(fn)), dim_(dim), root_(std::move(root)) {
  require(static_cast<bool>(fn_), "regression field: empty callable");
  require(dim_ >= 1, "regression field: dimension must be >= 1");
  if (root_) {
    require_dim(root_->size(), dim_, "regression field root");
    require_finite(*root_, "regression field root");
    for (StepIndex t : {1, 2, 3, 10, 100, 1000}) {
      const Vector r = fn_(t, *root_);
      require_dim(r.size(), dim_, "regression field value");
      if (!(r.cwiseAbs().maxCoeff() <= 1e-12)) {
        throw DomainError("regression field does not vanish at the declared root (t=" +
                          std::to_string(t) + ")");
      }
    }
  }
}

RegressionField RegressionField::linear(Vector root, double slope) {
  require(std::isfinite(slope), "linear field: slope must be finite");
  const Eigen::Index dim = root.size();
  Vector r0 = root;
  return RegressionField(
      FieldFamily::kLinear,
      [r0, slope](StepIndex, const Vector& z) -> Vector { return -slope * (z - r0); },
      dim, std::move(root));
}

RegressionField RegressionField::linear(Vector root, Matrix slope_matrix) {
  require(slope_matrix.rows() == root.size() && slope_matrix.cols() == root.size(),
          "linear field: slope matrix shape");
  const Eigen::Index dim = root.size();
  Vector r0 = root;
  return RegressionField(
      FieldFamily::kLinear,
      [r0, slope_matrix](StepIndex, const Vector& z) -> Vector {
        return -slope_matrix * (z - r0);
      },
      dim, std::move(root));
}

RegressionField RegressionField::polynomial(std::vector<double> coefficients,
                                            double root) {
  require(!coefficients.empty(), "polynomial field: no coefficients");
  for (double c : coefficients) require(std::isfinite(c), "polynomial field: coefficient");
  RegressionField field(
      FieldFamily::kPolynomial,
      [coefficients, root](StepIndex, const Vector& z) -> Vector {
        const double d = z[0] - root;
        // Horner on d * (c_1 + d * (c_2 + ...)).
        double acc = 0.0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
          acc = acc * d + *it;
        }
        return Vector::Constant(1, -acc * d);
      },
      1, Vector::Constant(1, root));
  field.coefficients_ = std::move(coefficients);
  return field;
}

RegressionField RegressionField::custom(Fn fn, Eigen::Index dim,
                                        std::optional<Vector> root) {
  return RegressionField(FieldFamily::kCustom, std::move(fn), dim, std::move(root));
}

std::string to_string(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kNone: return "none";
    case NoiseFamily::kIidGaussian: return "gaussian";
    case NoiseFamily::kIidStudent: return "student";
    case NoiseFamily::kStateScaled: return "state-scaled";
    case NoiseFamily::kVarianceGrowth: return "variance-growth";
  }
  return "none";
}

NoiseField NoiseField::none() { return NoiseField{}; }

NoiseField NoiseField::gaussian(double sigma) {
  require(sigma >= 0.0 && std::isfinite(sigma), "gaussian noise: sigma");
  NoiseField n;
  n.family_ = NoiseFamily::kIidGaussian;
  n.sigma_ = sigma;
  return n;
}

NoiseField NoiseField::student(double dof, double scale) {
  require(dof > 2.0 && std::isfinite(dof), "student noise: dof must exceed 2");
  require(scale > 0.0 && std::isfinite(scale), "student noise: scale");
  NoiseField n;
  n.family_ = NoiseFamily::kIidStudent;
  n.sigma_ = scale;
  n.dof_ = dof;
  return n;
}

NoiseField NoiseField::state_scaled(double sigma, Vector root) {
  require(sigma >= 0.0 && std::isfinite(sigma), "state-scaled noise: sigma");
  require_finite(root, "state-scaled noise root");
  NoiseField n;
  n.family_ = NoiseFamily::kStateScaled;
  n.sigma_ = sigma;
  n.root_ = std::move(root);
  return n;
}

NoiseField NoiseField::variance_growth(double sigma, double exponent) {
  require(sigma >= 0.0 && std::isfinite(sigma), "variance-growth noise: sigma");
  require(exponent >= 0.0 && std::isfinite(exponent),
          "variance-growth noise: exponent must be non-negative");
  NoiseField n;
  n.family_ = NoiseFamily::kVarianceGrowth;
  n.sigma_ = sigma;
  n.exponent_ = exponent;
  return n;
}

namespace {

double noise_scale(const NoiseField& n, StepIndex t, const Vector& z,
                   const Vector& root) {
  switch (n.family()) {
    case NoiseFamily::kNone: return 0.0;
    case NoiseFamily::kIidGaussian:
    case NoiseFamily::kIidStudent: return n.sigma();
    case NoiseFamily::kStateScaled: return n.sigma() * (1.0 + (z - root).norm());
    case NoiseFamily::kVarianceGrowth:
      return n.sigma() * std::pow(static_cast<double>(t), 0.5 * n.exponent());
  }
  return 0.0;
}

}  // namespace

Vector NoiseField::sample(StepIndex t, const Vector& z, RandomStream& stream) const {
  const Eigen::Index dim = z.size();
  if (family_ == NoiseFamily::kNone) return Vector::Zero(dim);
  if (family_ == NoiseFamily::kStateScaled) require_dim(root_.size(), dim, "state-scaled noise root");
  const double scale = noise_scale(*this, t, z, root_);
  Vector out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    out[i] = scale * (family_ == NoiseFamily::kIidStudent ? stream.student_t(dof_)
                                                          : stream.normal());
  }
  return out;
}

Matrix NoiseField::covariance(StepIndex t, const Vector& z) const {
  const Eigen::Index dim = z.size();
  if (family_ == NoiseFamily::kStateScaled) require_dim(root_.size(), dim, "state-scaled noise root");
  const double scale = noise_scale(*this, t, z, root_);
  double var = scale * scale;
  if (family_ == NoiseFamily::kIidStudent) var *= dof_ / (dof_ - 2.0);
  return var * Matrix::Identity(dim, dim);
}

std::optional<Vector> SAProblem::effective_root() const {
  if (root) return root;
  return field.root();
}

void SAProblem::validate() const {
  const Eigen::Index m = dimension();
  require(m >= 1, "problem: empty start vector");
  require_finite(start, "problem start");
  require_dim(field.dimension(), m, "regression field");
  if (root) require_dim(root->size(), m, "problem root");
  require(overflow_bound > 0.0, "problem: overflow bound must be positive");
  if (schedule.needs_auxiliary()) {
    require(static_cast<bool>(auxiliary), "problem: schedule needs an auxiliary sequence");
  }
}

StepResult sa_step_detailed(const SAProblem& problem, StepIndex t,
                            const Vector& z_prev, RandomStream& stream) {
  require(t >= 1, "sa_step: step index must be >= 1");
  require_dim(z_prev.size(), problem.dimension(), "sa_step state");
  require_finite(z_prev, "sa_step state");

  const Vector psi = problem.field(t, z_prev) + problem.noise.sample(t, z_prev, stream);
  const Vector update = z_prev + problem.step.apply(t, z_prev, psi);
  if (!update.allFinite()) throw DivergedError(t, "non-finite update");

  Region region;
  if (problem.schedule.needs_auxiliary()) {
    require(static_cast<bool>(problem.auxiliary), "sa_step: missing auxiliary sequence");
    const Vector aux = problem.auxiliary(t);
    region = problem.schedule.at(t, &aux);
  } else {
    region = problem.schedule.at(t);
  }

  StepResult result;
  result.z = region.project(update);
  result.projected = (result.z.array() != update.array()).any();
  if (result.z.cwiseAbs().maxCoeff() > problem.overflow_bound) {
    throw DivergedError(t, "state exceeded the overflow bound");
  }
  return result;
}

std::string to_string(TerminalStatus status) {
  switch (status) {
    case TerminalStatus::kCompleted: return "completed";
    case TerminalStatus::kDiverged: return "diverged";
    case TerminalStatus::kRejected: return "rejected";
  }
  return "completed";
}

Vector Trajectory::state(std::size_t i) const {
  require(!states.empty(), "trajectory: states were not recorded");
  require(i < steps.size(), "trajectory: index out of range");
  return Eigen::Map<const Vector>(states.data() + i * dim, dim);
}

Trajectory run(const SAProblem& problem, StepIndex horizon, std::uint64_t seed,
               const RecordOptions& options) {
  require(horizon >= 1, "run: horizon must be >= 1");
  require(options.stride >= 1 && options.from >= 1, "run: record options");
  Trajectory traj;
  traj.dim = problem.dimension();
  try {
    problem.validate();
  } catch (const DomainError& e) {
    traj.status = TerminalStatus::kRejected;
    traj.status_step = 0;
    traj.message = e.what();
    traj.final_state = problem.start;
    return traj;
  }

  const auto root = problem.effective_root();
  RandomStream stream(seed);
  Vector z = problem.start;

  const std::size_t expected =
      horizon >= options.from
          ? static_cast<std::size_t>((horizon - options.from) / options.stride + 2)
          : 1;
  traj.steps.reserve(expected);
  if (root) traj.norm2.reserve(expected);
  traj.projected.reserve(expected);
  if (options.states) traj.states.reserve(expected * traj.dim);

  for (StepIndex t = 1; t <= horizon; ++t) {
    StepResult r;
    try {
      r = sa_step_detailed(problem, t, z, stream);
    } catch (const DivergedError& e) {
      traj.status = TerminalStatus::kDiverged;
      traj.status_step = e.step();
      traj.message = e.what();
      break;
    } catch (const DomainError& e) {
      traj.status = TerminalStatus::kRejected;
      traj.status_step = t;
      traj.message = e.what();
      break;
    }
    z = std::move(r.z);
    traj.completed_steps = t;
    const bool record = (t >= options.from && (t - options.from) % options.stride == 0) ||
                        t == horizon;
    if (record) {
      traj.steps.push_back(t);
      if (options.states) traj.states.insert(traj.states.end(), z.data(), z.data() + z.size());
      if (root) traj.norm2.push_back((z - *root).squaredNorm());
      traj.projected.push_back(r.projected ? 1 : 0);
    }
  }
  traj.final_state = z;
  traj.draws = stream.draws();
  return traj;
}

std::vector<Trajectory> replicate(const SAProblem& problem, StepIndex horizon,
                                  std::size_t n_reps, std::uint64_t base_seed,
                                  const RecordOptions& options, unsigned workers) {
  require(n_reps >= 1, "replicate: n_reps must be >= 1");
  return parallel_map(
      n_reps,
      [&](std::size_t r) { return run(problem, horizon, derive_seed(base_seed, r), options); },
      workers);
}

}  // namespace tsa
