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

#include "tsa/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tsa {

QuadraticLyapunov QuadraticLyapunov::constant(Matrix c) {
  require_spd(c, "constant Lyapunov matrix");
  return QuadraticLyapunov(LyapunovFamily::kConstant,
                           [c = std::move(c)](StepIndex) { return c; });
}

QuadraticLyapunov QuadraticLyapunov::scaled_identity(ScalarSequence a,
                                                     double delta,
                                                     Eigen::Index dim) {
  require(static_cast<bool>(a), "scaled-identity Lyapunov: empty sequence");
  require(dim >= 1, "scaled-identity Lyapunov: dimension");
  return QuadraticLyapunov(
      LyapunovFamily::kScaledIdentity,
      [a = std::move(a), delta, dim](StepIndex t) -> Matrix {
        return std::pow(a(t), delta) * Matrix::Identity(dim, dim);
      });
}

QuadraticLyapunov QuadraticLyapunov::inverse_step(ScalarSequence a,
                                                  StepSizePolicy step,
                                                  Vector point) {
  require(static_cast<bool>(a), "inverse-step Lyapunov: empty sequence");
  return QuadraticLyapunov(
      LyapunovFamily::kInverseStep,
      [a = std::move(a), step = std::move(step), point = std::move(point)](StepIndex t) -> Matrix {
        // gamma_0 is undefined; reuse gamma_1.
        const Matrix g = step.matrix(std::max<StepIndex>(t, 1), point);
        return g.inverse() / a(t);
      });
}

QuadraticLyapunov QuadraticLyapunov::custom(MatrixSequence fn) {
  require(static_cast<bool>(fn), "custom Lyapunov: empty callable");
  return QuadraticLyapunov(LyapunovFamily::kCustom, std::move(fn));
}

Matrix QuadraticLyapunov::at(StepIndex t) const {
  require(t >= 0, "Lyapunov: negative step index");
  Matrix c = fn_(t);
  if (t >= 1) require_spd(c, "Lyapunov matrix C_" + std::to_string(t));
  return c;
}

double QuadraticLyapunov::value(StepIndex t, const Vector& u) const {
  const Matrix c = at(t);
  require_dim(u.size(), c.rows(), "Lyapunov argument");
  return u.dot(c * u);
}

std::vector<double> lyapunov_track(const Trajectory& trajectory,
                                   const QuadraticLyapunov& lyapunov,
                                   const Vector& root) {
  require_dim(root.size(), trajectory.dim, "lyapunov_track root");
  std::vector<double> out;
  out.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    out.push_back(lyapunov.value(trajectory.steps[i], trajectory.state(i) - root));
  }
  return out;
}

double decrement_k(const SAProblem& problem, const QuadraticLyapunov& lyapunov,
                   const Vector& root, StepIndex t, const Vector& u,
                   const std::optional<Matrix>& noise_covariance) {
  require(t >= 1, "decrement_k: step index must be >= 1");
  const Eigen::Index m = problem.dimension();
  require_dim(root.size(), m, "decrement_k root");
  require_dim(u.size(), m, "decrement_k argument");
  const Vector z = root + u;
  const Matrix c_now = lyapunov.at(t);
  const Matrix c_prev = lyapunov.at(t - 1);
  require_dim(c_now.rows(), m, "Lyapunov matrix");
  const Matrix gamma = problem.step.matrix(t, z);
  const Vector drift = gamma * problem.field(t, z);
  const Matrix sigma = noise_covariance ? *noise_covariance : problem.noise.covariance(t, z);
  require(sigma.rows() == m && sigma.cols() == m, "decrement_k: noise covariance shape");

  return u.dot((c_now - c_prev) * u) + 2.0 * u.dot(c_now * drift) +
         drift.dot(c_now * drift) + (gamma.transpose() * c_now * gamma * sigma).trace();
}

std::string to_string(DriftCondition condition) {
  switch (condition) {
    case DriftCondition::kD1: return "D1";
    case DriftCondition::kH1: return "H1";
    case DriftCondition::kH4: return "H4";
    case DriftCondition::kW1: return "W1";
    case DriftCondition::kB1: return "B1";
    case DriftCondition::kY1: return "Y1";
  }
  return "D1";
}

DriftCondition parse_drift_condition(const std::string& name) {
  for (auto c : {DriftCondition::kD1, DriftCondition::kH1, DriftCondition::kH4,
                 DriftCondition::kW1, DriftCondition::kB1, DriftCondition::kY1}) {
    if (to_string(c) == name) return c;
  }
  throw DomainError("unknown drift condition '" + name + "'");
}

DriftReport check_drift(const RegressionField& field,
                        const TruncationSchedule& schedule, const Vector& root,
                        DriftCondition condition,
                        const std::vector<Vector>& probe_grid,
                        const TimeRange& range, const DriftOptions& options) {
  require(!probe_grid.empty(), "check_drift: empty probe grid");
  require(range.first >= 1 && range.last >= range.first && range.stride >= 1,
          "check_drift: invalid time range");
  require_dim(root.size(), field.dimension(), "check_drift root");
  if (condition == DriftCondition::kW1) {
    require(static_cast<bool>(options.a), "check_drift: W1 needs the step gains a_t");
  }
  if (condition == DriftCondition::kY1) {
    require(field.dimension() == 1, "check_drift: Y1 is one-dimensional");
  }
  const bool filter_region = condition == DriftCondition::kD1 ||
                             condition == DriftCondition::kH1 ||
                             condition == DriftCondition::kH4 ||
                             condition == DriftCondition::kW1;

  DriftReport report;
  auto add = [&](StepIndex t, Vector point, double value, double threshold, bool ok) {
    if (!ok) {
      if (t >= options.t_min) ++report.violations;
      else ++report.early_violations;
    }
    report.rows.push_back({condition, t, std::move(point), value, threshold, ok});
  };

  for (StepIndex t = range.first; t <= range.last; t += range.stride) {
    if (condition == DriftCondition::kY1) {
      const double h = 1e-5 * (1.0 + std::abs(root[0]));
      Vector up = root, down = root;
      up[0] += h;
      down[0] -= h;
      const double slope = (field(t, up)[0] - field(t, down)[0]) / (2.0 * h);
      const double threshold = -0.5 + options.y1_tolerance;
      add(t, root, slope, threshold, slope <= threshold);
      continue;
    }

    std::optional<Region> previous;
    if (filter_region) {
      const StepIndex s = std::max<StepIndex>(t - 1, 1);
      if (schedule.needs_auxiliary()) {
        require(static_cast<bool>(options.auxiliary),
                "check_drift: schedule needs an auxiliary sequence");
        const Vector aux = options.auxiliary(s);
        previous = schedule.at(s, &aux);
      } else {
        previous = schedule.at(s);
      }
    }

    for (const Vector& z : probe_grid) {
      require_dim(z.size(), root.size(), "probe point");
      if (previous && !previous->contains(z)) {
        ++report.skipped;
        continue;
      }
      const Vector u = z - root;
      const double inner = u.dot(field(t, z));
      switch (condition) {
        case DriftCondition::kD1:
        case DriftCondition::kH1:
          add(t, z, inner, 0.0, inner <= 0.0);
          break;
        case DriftCondition::kH4:
          if (u.squaredNorm() == 0.0) {
            ++report.skipped;
            break;
          }
          add(t, z, inner, 0.0, inner < 0.0);
          break;
        case DriftCondition::kW1: {
          const double da = options.a(t) - options.a(t - 1);
          const double threshold = -0.5 * da * u.squaredNorm();
          add(t, z, inner, threshold, inner <= threshold);
          break;
        }
        case DriftCondition::kB1: {
          const double threshold = -0.5 * u.squaredNorm();
          add(t, z, inner, threshold, inner <= threshold);
          break;
        }
        case DriftCondition::kY1:
          break;
      }
    }
  }
  return report;
}

ErrorSeries ErrorSeries::from_trajectory(const Trajectory& trajectory,
                                         const std::optional<Vector>& root) {
  require(trajectory.completed(), "rate analysis needs completed trajectories");
  require(trajectory.size() >= 1, "rate analysis: empty trajectory");
  ErrorSeries s;
  s.first = trajectory.steps.front();
  s.stride = trajectory.size() >= 2 ? trajectory.steps[1] - trajectory.steps[0] : 1;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    if (trajectory.steps[i] != s.time(i)) {
      throw DomainError("rate analysis: trajectory is not recorded on a regular grid");
    }
  }
  if (root && !trajectory.states.empty()) {
    s.err2.reserve(trajectory.size());
    for (std::size_t i = 0; i < trajectory.size(); ++i) {
      s.err2.push_back((trajectory.state(i) - *root).squaredNorm());
    }
  } else {
    require(trajectory.norm2.size() == trajectory.size(),
            "rate analysis: trajectory carries neither states nor errors");
    s.err2 = trajectory.norm2;
  }
  return s;
}

double quantile(std::vector<double> values, double q) {
  require(!values.empty(), "quantile of an empty sample");
  require(q >= 0.0 && q <= 1.0, "quantile level");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

namespace {

struct LineFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit fit;
  fit.points = x.size();
  if (x.size() < 2) return fit;
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

StepIndex window_bound(double fraction, StepIndex horizon, bool lower) {
  const double v = fraction * static_cast<double>(horizon);
  return lower ? std::max<StepIndex>(1, static_cast<StepIndex>(std::ceil(v)))
               : static_cast<StepIndex>(std::floor(v));
}

}  // namespace

RateReport rate_fit(std::span<const ErrorSeries> series,
                    const std::vector<double>& deltas, const RateOptions& options) {
  require(!series.empty(), "rate_fit: no replications");
  require(options.tail_fraction > 0.0 && options.tail_fraction < 1.0,
          "rate_fit: tail fraction must lie in (0, 1)");
  require(options.early_lo < options.early_hi && options.late_lo < options.late_hi &&
              options.early_hi <= options.late_lo + 1e-12 && options.late_hi <= 1.0 &&
              options.early_lo > 0.0,
          "rate_fit: boundedness windows must be nested and ordered");
  const ErrorSeries& ref = series.front();
  require(!ref.err2.empty(), "rate_fit: empty error series");
  for (const auto& s : series) {
    require(s.first == ref.first && s.stride == ref.stride && s.err2.size() == ref.err2.size(),
            "rate_fit: replications must share one time grid");
  }

  RateReport report;
  report.replications = series.size();
  report.horizon = ref.last();
  const StepIndex horizon = report.horizon;
  report.tail_first = window_bound(options.tail_fraction, horizon, true);
  report.tail_last = horizon;

  // Pooled tail slope of the mean squared error.
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ref.err2.size(); ++i) {
    const StepIndex t = ref.time(i);
    if (t < report.tail_first) continue;
    double mse = 0.0;
    for (const auto& s : series) mse += s.err2[i];
    mse /= static_cast<double>(series.size());
    if (!(mse > 0.0)) {
      ++report.excluded_zero;
      continue;
    }
    lx.push_back(std::log(static_cast<double>(t)));
    ly.push_back(std::log(mse));
  }
  require(!lx.empty() || report.excluded_zero > 0, "rate_fit: tail window is empty");
  const LineFit pooled = least_squares(lx, ly);
  report.slope = pooled.slope;
  report.intercept = pooled.intercept;
  report.fit_points = pooled.points;

  for (const auto& s : series) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.err2.size(); ++i) {
      const StepIndex t = s.time(i);
      if (t < report.tail_first || !(s.err2[i] > 0.0)) continue;
      x.push_back(std::log(static_cast<double>(t)));
      y.push_back(std::log(s.err2[i]));
    }
    report.rep_slopes.push_back(least_squares(x, y).slope);
  }
  std::vector<double> finite_slopes;
  for (double v : report.rep_slopes) {
    if (std::isfinite(v)) finite_slopes.push_back(v);
  }
  if (!finite_slopes.empty()) {
    report.median_rep_slope = median(finite_slopes);
    report.q10_rep_slope = quantile(finite_slopes, 0.1);
    report.q90_rep_slope = quantile(finite_slopes, 0.9);
  }

  for (double delta : deltas) {
    BoundednessStats b;
    b.delta = delta;
    b.early_first = window_bound(options.early_lo, horizon, true);
    b.early_last = window_bound(options.early_hi, horizon, false);
    b.late_first = std::max(b.early_last + 1, window_bound(options.late_lo, horizon, true));
    b.late_last = window_bound(options.late_hi, horizon, false);
    for (const auto& s : series) {
      double early = -1.0, late = -1.0;
      for (std::size_t i = 0; i < s.err2.size(); ++i) {
        const StepIndex t = s.time(i);
        const double v = std::pow(static_cast<double>(t), delta) * s.err2[i];
        if (t >= b.early_first && t <= b.early_last) early = std::max(early, v);
        if (t >= b.late_first && t <= b.late_last) late = std::max(late, v);
      }
      require(early >= 0.0 && late >= 0.0, "rate_fit: a boundedness window holds no samples");
      b.early_sup.push_back(early);
      b.late_sup.push_back(late);
      b.ratio.push_back(early > 0.0 ? late / early
                                    : (late > 0.0 ? std::numeric_limits<double>::infinity() : 1.0));
    }
    b.median_ratio = median(b.ratio);
    b.q10_ratio = quantile(b.ratio, 0.1);
    b.q90_ratio = quantile(b.ratio, 0.9);
    b.median_late_sup = median(b.late_sup);
    report.boundedness.push_back(std::move(b));
  }
  return report;
}

RateReport rate_fit(std::span<const Trajectory> trajectories, const Vector& root,
                    const std::vector<double>& deltas, const RateOptions& options) {
  std::vector<ErrorSeries> series;
  series.reserve(trajectories.size());
  for (const auto& t : trajectories) series.push_back(ErrorSeries::from_trajectory(t, root));
  return rate_fit(std::span<const ErrorSeries>(series), deltas, options);
}

double adt_partial_sum(const ScalarSequence& a, StepIndex n) {
  require(n >= 0, "adt_partial_sum: negative length");
  double sum = 0.0;
  double a_now = a(1);
  for (StepIndex t = 1; t <= n; ++t) {
    const double a_next = a(t + 1);
    require(a_now > 0.0 && a_next >= a_now,
            "adt_partial_sum: sequence must be positive and non-decreasing");
    sum += std::max(0.0, (a_next - a_now - 1.0) / a_now);
    a_now = a_next;
  }
  return sum;
}

}  // namespace tsa
