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

#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tsa/diagnostics.hpp"

namespace tsa {
namespace {

Vector scalar(double x) { return Vector::Constant(1, x); }

ErrorSeries power_law(double exponent, StepIndex T) {
  ErrorSeries s;
  s.first = 1;
  for (StepIndex t = 1; t <= T; ++t) s.err2.push_back(std::pow(static_cast<double>(t), exponent));
  return s;
}

TEST(LyapunovTrack, IdentityGivesSquaredNorm) {
  SAProblem p;
  p.start = Vector::Constant(2, 1.0);
  p.field = RegressionField::linear(Vector::Zero(2), 0.5);
  const Trajectory tr = run(p, 20, 1);
  const auto v = lyapunov_track(tr, QuadraticLyapunov::constant(Matrix::Identity(2, 2)), Vector::Zero(2));
  for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_DOUBLE_EQ(v[i], tr.norm2[i]);
}

TEST(LyapunovTrack, AtRootIsZero) {
  SAProblem p;
  p.start = scalar(2.0);
  p.field = RegressionField::linear(scalar(2.0));
  const Trajectory tr = run(p, 10, 1);
  for (double v : lyapunov_track(tr, QuadraticLyapunov::constant(Matrix::Identity(1, 1)), scalar(2.0))) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(LyapunovTrack, CancellationGivesConstant) {
  // Z_t = 1/sqrt(t) exactly, C_t = t.
  Trajectory tr;
  tr.dim = 1;
  for (StepIndex t = 1; t <= 50; ++t) {
    tr.steps.push_back(t);
    tr.states.push_back(1.0 / std::sqrt(static_cast<double>(t)));
    tr.projected.push_back(0);
  }
  tr.completed_steps = 50;
  const auto lyap = QuadraticLyapunov::scaled_identity([](StepIndex t) { return static_cast<double>(t); }, 1.0, 1);
  for (double v : lyapunov_track(tr, lyap, scalar(0.0))) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(LyapunovTrack, PathwiseNonIncreasingForLinearField) {
  SAProblem p;
  p.start = Vector::Constant(3, 4.0);
  p.field = RegressionField::linear(Vector::Zero(3), 0.7);
  const Trajectory tr = run(p, 300, 1);
  const auto v = lyapunov_track(tr, QuadraticLyapunov::constant(Matrix::Identity(3, 3)), Vector::Zero(3));
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i], v[i - 1]);
}

TEST(DecrementK, NoiseOnlyAtRoot) {
  SAProblem p;
  p.start = Vector::Zero(2);
  p.field = RegressionField::linear(Vector::Zero(2));
  p.noise = NoiseField::gaussian(0.5);
  const Matrix c = (Matrix(2, 2) << 2.0, 0.3, 0.3, 1.0).finished();
  const double k = decrement_k(p, QuadraticLyapunov::constant(c), Vector::Zero(2), 4, Vector::Zero(2));
  EXPECT_NEAR(k, 0.25 * 0.25 * 0.25 * c.trace(), 1e-15);
}

TEST(DecrementK, ScalarAlgebra) {
  SAProblem p;
  p.start = scalar(0.0);
  p.field = RegressionField::linear(scalar(0.0));
  p.step = StepSizePolicy::custom([](StepIndex, const Vector&) { return Matrix::Identity(1, 1); });
  for (double u : {-2.0, 0.3, 1.0}) {
    EXPECT_NEAR(decrement_k(p, QuadraticLyapunov::constant(Matrix::Identity(1, 1)), scalar(0.0), 3, scalar(u)),
                -u * u, 1e-15);
  }
}

TEST(DecrementK, AlgebraicIdentityWithoutNoise) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    Matrix a = Matrix::NullaryExpr(3, 3, [&] { return n(rng); });
    const Matrix c = a * a.transpose() + Matrix::Identity(3, 3);
    Matrix b = Matrix::NullaryExpr(3, 3, [&] { return n(rng); });
    const Vector root = Vector::NullaryExpr(3, [&] { return n(rng); });
    const Vector u = Vector::NullaryExpr(3, [&] { return n(rng); });
    SAProblem p;
    p.start = root;
    p.field = RegressionField::linear(root, b);
    p.step = StepSizePolicy::power_decay(0.8);
    const StepIndex t = 7;
    const Vector gr = std::pow(7.0, -0.8) * p.field(t, root + u);
    const double expected = 2.0 * u.dot(c * gr) + gr.dot(c * gr);
    EXPECT_NEAR(decrement_k(p, QuadraticLyapunov::constant(c), root, t, u, Matrix::Zero(3, 3)), expected,
                1e-12 * (1.0 + std::abs(expected)));
  }
}

std::vector<Vector> line_grid(double lo, double hi, int n) {
  std::vector<Vector> g;
  for (int i = 0; i < n; ++i) g.push_back(scalar(lo + (hi - lo) * i / (n - 1)));
  return g;
}

TEST(CheckDrift, LinearFieldSatisfiesD1) {
  const auto f = RegressionField::linear(scalar(1.0));
  const auto r = check_drift(f, TruncationSchedule(), scalar(1.0), DriftCondition::kD1, line_grid(-5, 5, 101),
                             {1, 20, 1});
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.rows.size(), 20u * 101u);
}

TEST(CheckDrift, PureCubicViolatesB1) {
  const auto f = RegressionField::polynomial({0.0, 0.0, 1.0}, 0.0);
  const auto r = check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kB1, {scalar(0.5)}, {1, 1, 1});
  ASSERT_EQ(r.rows.size(), 1u);
  EXPECT_NEAR(r.rows[0].value, -0.0625, 1e-15);
  EXPECT_NEAR(r.rows[0].threshold, -0.125, 1e-15);
  EXPECT_FALSE(r.rows[0].ok);
  EXPECT_EQ(r.violations, 1u);
}

TEST(CheckDrift, PolynomialWithLinearTermSatisfiesB1AndY1) {
  const auto f = RegressionField::polynomial({0.5, 0.0, 1.0}, 0.0);
  EXPECT_TRUE(check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kB1, line_grid(-0.5, 0.5, 21),
                          {1, 5, 1})
                  .passed());
  EXPECT_TRUE(check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kY1, {scalar(0.0)}, {1, 5, 1})
                  .passed());
  const auto flat = RegressionField::polynomial({0.4}, 0.0);
  EXPECT_FALSE(
      check_drift(flat, TruncationSchedule(), scalar(0.0), DriftCondition::kY1, {scalar(0.0)}, {1, 1, 1}).passed());
}

TEST(CheckDrift, W1UsesGainIncrements) {
  const auto f = RegressionField::linear(scalar(0.0), 0.5);
  DriftOptions opt;
  opt.a = [](StepIndex t) { return static_cast<double>(t); };
  EXPECT_TRUE(check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kW1, line_grid(-3, 3, 31), {1, 10, 1},
                          opt)
                  .passed());
  opt.a = [](StepIndex t) { return 2.0 * static_cast<double>(t); };
  EXPECT_FALSE(check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kW1, line_grid(-3, 3, 31),
                           {1, 10, 1}, opt)
                   .passed());
}

TEST(CheckDrift, H4SkipsRootAndEarlyViolationsAreNotCounted) {
  const auto f = RegressionField::custom(
      [](StepIndex t, const Vector& z) { return Vector(t < 3 ? z : Vector(-z)); }, 1, scalar(0.0));
  DriftOptions opt;
  opt.t_min = 3;
  const auto r = check_drift(f, TruncationSchedule(), scalar(0.0), DriftCondition::kH4, line_grid(-1, 1, 3), {1, 5, 1},
                             opt);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_EQ(r.early_violations, 4u);
  EXPECT_GE(r.skipped, 5u);
}

TEST(CheckDrift, EmptyGridIsAnError) {
  EXPECT_THROW(check_drift(RegressionField::linear(scalar(0)), TruncationSchedule(), scalar(0), DriftCondition::kD1, {},
                           {1, 1, 1}),
               DomainError);
}

TEST(CheckDrift, ProbesOnlyInsidePreviousRegion) {
  const auto f = RegressionField::linear(scalar(0.0));
  const auto s = TruncationSchedule::log_box(1.0, 1.0, scalar(0.0));
  const auto r = check_drift(f, s, scalar(0.0), DriftCondition::kH1, line_grid(-10, 10, 21), {1, 3, 1});
  for (const auto& row : r.rows) {
    const StepIndex prev = std::max<StepIndex>(1, row.t - 1);
    EXPECT_TRUE(s.at(prev).contains(row.grid_point));
  }
}

TEST(ParseDriftCondition, RoundTrip) {
  for (auto c : {DriftCondition::kD1, DriftCondition::kH1, DriftCondition::kH4, DriftCondition::kW1,
                 DriftCondition::kB1, DriftCondition::kY1}) {
    EXPECT_EQ(parse_drift_condition(to_string(c)), c);
  }
  EXPECT_THROW(parse_drift_condition("Q7"), DomainError);
}

TEST(RateFit, ExactPowerLaw) {
  const std::vector<ErrorSeries> s{power_law(-2.0 / 3.0, 4000)};
  const RateReport r = rate_fit(std::span<const ErrorSeries>(s), {}, {});
  EXPECT_NEAR(r.slope, -2.0 / 3.0, 1e-9);
  EXPECT_EQ(r.tail_first, 2000);
  EXPECT_EQ(r.tail_last, 4000);
}

TEST(RateFit, ConstantErrorHasZeroSlope) {
  ErrorSeries s;
  s.err2.assign(1000, 0.25);
  const std::vector<ErrorSeries> v{s};
  EXPECT_NEAR(rate_fit(std::span<const ErrorSeries>(v), {}, {}).slope, 0.0, 1e-12);
}

TEST(RateFit, ZeroErrorsExcludedAndCounted) {
  ErrorSeries s = power_law(-1.0, 1000);
  s.err2[899] = 0.0;
  s.err2[949] = 0.0;
  const std::vector<ErrorSeries> v{s};
  const RateReport r = rate_fit(std::span<const ErrorSeries>(v), {}, {});
  EXPECT_EQ(r.excluded_zero, 2u);
  EXPECT_NEAR(r.slope, -1.0, 1e-9);
}

TEST(RateFit, BoundednessRatioOfExactRate) {
  // t^0.5 * t^-0.5 = 1 in both windows.
  const std::vector<ErrorSeries> v{power_law(-0.5, 1000), power_law(-0.5, 1000)};
  const RateReport r = rate_fit(std::span<const ErrorSeries>(v), {0.5, 1.0}, {});
  ASSERT_EQ(r.boundedness.size(), 2u);
  EXPECT_NEAR(r.boundedness[0].median_ratio, 1.0, 1e-12);
  // t^1 * t^-0.5 grows: late sup / early sup = sqrt(1000 / 500).
  EXPECT_NEAR(r.boundedness[1].median_ratio, std::sqrt(2.0), 1e-12);
}

TEST(RateFit, InvariantUnderReplicationOrder) {
  std::mt19937_64 rng(2);
  std::lognormal_distribution<double> ln(0.0, 1.0);
  std::vector<ErrorSeries> v(7);
  for (auto& s : v) {
    for (StepIndex t = 1; t <= 400; ++t) s.err2.push_back(ln(rng) / static_cast<double>(t));
  }
  const RateReport a = rate_fit(std::span<const ErrorSeries>(v), {0.5}, {});
  std::reverse(v.begin(), v.end());
  std::swap(v[1], v[4]);
  const RateReport b = rate_fit(std::span<const ErrorSeries>(v), {0.5}, {});
  EXPECT_NEAR(a.slope, b.slope, 1e-12);
  EXPECT_EQ(a.boundedness[0].median_ratio, b.boundedness[0].median_ratio);
  EXPECT_EQ(a.median_rep_slope, b.median_rep_slope);
}

TEST(RateFit, RejectsBadOptions) {
  const std::vector<ErrorSeries> v{power_law(-1.0, 100)};
  RateOptions o;
  o.tail_fraction = 1.0;
  EXPECT_THROW(rate_fit(std::span<const ErrorSeries>(v), {}, o), DomainError);
}

TEST(RateFit, FromTrajectories) {
  SAProblem p;
  p.start = scalar(1.0);
  p.field = RegressionField::linear(scalar(0.0), 0.5);
  const std::vector<Trajectory> trs{run(p, 400, 1)};
  const RateReport r = rate_fit(std::span<const Trajectory>(trs), scalar(0.0), {}, {});
  // Z_t ~ c / sqrt(t): squared error slope tends to -1.
  EXPECT_NEAR(r.slope, -1.0, 0.01);
}

TEST(AdtPartialSum, LinearGainIsZero) {
  const ScalarSequence a = [](StepIndex t) { return static_cast<double>(t); };
  for (StepIndex n : {1, 10, 1000}) EXPECT_EQ(adt_partial_sum(a, n), 0.0);
}

TEST(AdtPartialSum, QuadraticGainIsTwiceHarmonic) {
  const ScalarSequence a = [](StepIndex t) { return static_cast<double>(t) * static_cast<double>(t); };
  double h = 0.0;
  for (int t = 1; t <= 10; ++t) h += 1.0 / t;
  EXPECT_NEAR(adt_partial_sum(a, 10), 2.0 * h, 1e-12);
  EXPECT_NEAR(adt_partial_sum(a, 10), 5.85794, 1e-5);
}

TEST(AdtPartialSum, SummableInverseGainsDiverge) {
  const ScalarSequence a = [](StepIndex t) { return std::pow(static_cast<double>(t), 1.5); };
  double prev = 0.0;
  for (StepIndex n = 1000; n <= 200000; n *= 2) {
    const double s = adt_partial_sum(a, n);
    EXPECT_GE(s, prev);
    prev = s;
  }
  EXPECT_GT(prev, 10.0);
}

TEST(Quantile, LinearInterpolation) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0, 4.0}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({0.0, 10.0}, 0.1), 1.0);
}

}  // namespace
}  // namespace tsa
