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

// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsa/diagnostics.hpp"
#include "tsa/engine.hpp"
#include "tsa/estimators.hpp"
#include "tsa/scenarios.hpp"
#include "tsa/truncation.hpp"

namespace {

using tsa::Matrix;
using tsa::Region;
using tsa::StepIndex;
using tsa::Vector;

struct Outcome {
  bool passed;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Matrix random_spd(std::mt19937_64& rng, Eigen::Index m, double floor = 0.2) {
  std::normal_distribution<double> n(0.0, 1.0);
  const Matrix a = Matrix::NullaryExpr(m, m, [&] { return n(rng); });
  return a * a.transpose() + floor * Matrix::Identity(m, m);
}

// 1. Projection vs brute-force grid minimizer over the region's bounding box.
Outcome projection_oracle() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> n(0.0, 2.0);
  std::uniform_real_distribution<double> w(0.2, 2.0);
  constexpr int kGrid = 100;
  std::size_t failures = 0, cases = 0;
  for (int family = 0; family < 3; ++family) {
    for (int k = 0; k < 1000; ++k) {
      const Vector c = Vector::NullaryExpr(2, [&] { return n(rng); });
      const Vector z = Vector::NullaryExpr(2, [&] { return 2.0 * n(rng); });
      Region region;
      Vector lo(2), hi(2);
      if (family == 0) {
        const Vector half = Vector::NullaryExpr(2, [&] { return w(rng); });
        region = Region::box(c - half, c + half);
        lo = c - half;
        hi = c + half;
      } else if (family == 1) {
        const double r = w(rng);
        region = Region::sphere(c, r);
        lo = c.array() - r;
        hi = c.array() + r;
      } else {
        region = Region::whole_space();
        lo = z.array() - 1.0;
        hi = z.array() + 1.0;
      }
      const Vector p = region.project(z);
      const double dist = (p - z).norm();
      const double spacing = ((hi - lo) / (kGrid - 1)).maxCoeff();
      double best = INFINITY;
      for (int i = 0; i < kGrid; ++i) {
        for (int j = 0; j < kGrid; ++j) {
          Vector g(2);
          g << lo[0] + (hi[0] - lo[0]) * i / (kGrid - 1), lo[1] + (hi[1] - lo[1]) * j / (kGrid - 1);
          if (region.contains(g, 1e-12)) best = std::min(best, (g - z).norm());
        }
      }
      ++cases;
      if (!region.contains(p, 1e-12) || dist > best + spacing) ++failures;
    }
  }
  const double secs = seconds_since(start);
  std::ostringstream s;
  s << cases << " cases over box/sphere/whole-space, " << failures << " beaten by a grid candidate [" << secs
    << " s]";
  return {failures == 0 && secs < 10.0, s.str()};
}

// 2. Sphere projection never increases the C-norm distance when the
// eigenvalue condition holds.
Outcome cnorm_monotonicity() {
  std::mt19937_64 rng(1002);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t increases = 0, cases = 0;
  while (cases < 10000) {
    const Eigen::Index m = 1 + static_cast<Eigen::Index>(cases % 4);
    const Matrix c = random_spd(rng, m, 0.5);
    const Vector center = Vector::NullaryExpr(m, [&] { return n(rng); });
    const double radius = 0.5 + 2.0 * u(rng);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    const double reach = radius * std::sqrt(eig.eigenvalues().minCoeff() / eig.eigenvalues().maxCoeff());
    const Vector dir = Vector::NullaryExpr(m, [&] { return n(rng); }).normalized();
    const Vector root = center + u(rng) * reach * dir;
    const Vector out = Vector::NullaryExpr(m, [&] { return n(rng); }).normalized();
    const Vector z = center + radius * (1.0 + 1e-6 + 3.0 * u(rng)) * out;
    if (!tsa::cnorm_condition(c, center, radius, root)) continue;
    const Region sphere = Region::sphere(center, radius);
    if (sphere.contains(z)) continue;
    const Vector p = sphere.project(z);
    const double before = (z - root).dot(c * (z - root));
    const double after = (p - root).dot(c * (p - root));
    if (after - before > 1e-10) ++increases;
    ++cases;
  }
  std::ostringstream s;
  s << cases << " exterior cases, " << increases << " C-norm increases";
  return {increases == 0, s.str()};
}

// 3. Recursive inverse information vs direct inverse along AR(2) data.
Outcome sherman_morrison_consistency() {
  tsa::ARModel model{(Vector(2) << 0.5, -0.3).finished(), tsa::Innovation::gaussian(1.0), Vector()};
  const tsa::ARSeries data = tsa::simulate_ar(model, 500, 1003);
  tsa::EstimatorState state = tsa::EstimatorState::initial(2);
  Matrix info = Matrix::Identity(2, 2);
  bool spd = true;
  for (StepIndex t = 1; t <= 500; ++t) {
    const Vector x = data.regressor(t, 2);
    state = tsa::rls_step(state, x, data.at(t));
    info += x * x.transpose();
    spd = spd && tsa::is_spd(state.inv_info);
  }
  const double err = (state.inv_info - info.inverse()).cwiseAbs().maxCoeff();
  std::ostringstream s;
  s << "max |recursive - direct| = " << err << ", SPD at every step: " << (spd ? "yes" : "no");
  return {err < 1e-8 && spd, s.str()};
}

// 4. G1 matrix identity under the inverse-step construction.
Outcome g1_identity() {
  std::mt19937_64 rng(1004);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst_gap = 0.0, worst_eig = -INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Index m = 1 + k % 4;
    const Matrix prev = random_spd(rng, m);
    Matrix beta;
    if (k % 2 == 0) {
      const Vector x = Vector::NullaryExpr(m, [&] { return n(rng); });
      beta = x * x.transpose();
    } else {
      beta = random_spd(rng, m, 0.0);
    }
    const Matrix curr = (prev.inverse() + beta).inverse();
    const Matrix g1 = tsa::g1_matrix(prev, curr, beta);
    const Matrix pi = prev.inverse();
    const Matrix expected = pi * (curr - prev) * pi;
    worst_gap = std::max(worst_gap, (g1 - expected).cwiseAbs().maxCoeff());
    worst_eig = std::max(worst_eig, Eigen::SelfAdjointEigenSolver<Matrix>(g1).eigenvalues().maxCoeff());
  }
  std::ostringstream s;
  s << "max entry gap = " << worst_gap << ", max eigenvalue = " << worst_eig;
  return {worst_gap <= 1e-10 && worst_eig <= 1e-10, s.str()};
}

std::string describe(const tsa::ScenarioReport& r) {
  std::ostringstream s;
  bool first = true;
  for (const auto& c : r.checks) {
    if (c.name.rfind("condition:", 0) == 0) continue;
    if (!first) s << "; ";
    first = false;
    s << c.name << " = " << c.value << ' ' << c.comparison << ' ' << c.threshold;
    if (c.comparison == "within") s << " +/- " << c.tolerance;
    if (!c.passed) s << " (FAILED)";
  }
  return s.str();
}

Outcome scenario(const std::string& file, double max_seconds = 0.0) {
  const auto start = std::chrono::steady_clock::now();
  const auto config = tsa::ScenarioConfig::load(std::string(TSA_CONFIG_DIR) + "/" + file);
  const auto report = tsa::run_scenario(config);
  const double secs = seconds_since(start);
  std::ostringstream s;
  s << describe(report) << " [T=" << config.horizon << ", reps=" << config.replications << ", " << secs << " s]";
  const bool on_time = max_seconds <= 0.0 || secs <= max_seconds;
  if (!on_time) s << " (over the " << max_seconds << " s budget)";
  return {report.passed() && on_time, s.str()};
}

// 10. Gaussian RML and RLS on identical inputs.
Outcome gaussian_rml_is_rls() {
  tsa::ARModel model{(Vector(2) << 0.4, 0.3).finished(), tsa::Innovation::gaussian(1.0), Vector()};
  const tsa::ARSeries data = tsa::simulate_ar(model, 1000, 1010);
  tsa::EstimatorState rls = tsa::EstimatorState::initial(2), rml = rls;
  const auto score = tsa::gaussian_score(1.0);
  double gap = 0.0;
  for (StepIndex t = 1; t <= 1000; ++t) {
    const Vector x = data.regressor(t, 2);
    rls = tsa::rls_step(rls, x, data.at(t));
    rml = tsa::rml_step(rml, x, data.at(t), score, tsa::gaussian_fisher(1.0));
    gap = std::max({gap, (rls.theta - rml.theta).cwiseAbs().maxCoeff(),
                    (rls.inv_info - rml.inv_info).cwiseAbs().maxCoeff()});
  }
  std::ostringstream s;
  s << "max state gap over T=1000: " << gap;
  return {gap <= 1e-12, s.str()};
}

// 11. Partial sums for a_t = t^2 and a_t = t.
Outcome adt_sums() {
  const tsa::ScalarSequence sq = [](StepIndex t) { return static_cast<double>(t) * static_cast<double>(t); };
  const tsa::ScalarSequence lin = [](StepIndex t) { return static_cast<double>(t); };
  double worst = 0.0, h = 0.0, linear_max = 0.0;
  for (StepIndex n = 1; n <= 200; ++n) {
    h += 1.0 / static_cast<double>(n);
    worst = std::max(worst, std::abs(tsa::adt_partial_sum(sq, n) - 2.0 * h));
    linear_max = std::max(linear_max, std::abs(tsa::adt_partial_sum(lin, n)));
  }
  const double s200 = tsa::adt_partial_sum(sq, 200);
  std::ostringstream s;
  s << "max |S_N - 2 H_N| = " << worst << ", S_200 = " << s200 << ", max |S_N| for a_t = t: " << linear_max;
  return {worst <= 1e-12 && s200 > 10.0 && linear_max == 0.0, s.str()};
}

// 12. Closed-form decrement vs Monte Carlo expectation of
// V_t(u + gamma (R + eps)) - V_{t-1}(u).
Outcome decrement_monte_carlo() {
  std::mt19937_64 rng(1012);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  constexpr int kDraws = 1000000;
  int within = 0;
  double worst_z = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index m = 1 + k % 3;
    const StepIndex t = 2 + k;
    const Matrix c_prev = random_spd(rng, m), c_curr = random_spd(rng, m);
    const Matrix gamma = random_spd(rng, m) / static_cast<double>(t);
    const Matrix slope = random_spd(rng, m);
    const Vector root = Vector::NullaryExpr(m, [&] { return n(rng); });
    const Vector uvec = Vector::NullaryExpr(m, [&] { return n(rng); });
    const double sigma = u(rng);

    tsa::SAProblem p;
    p.start = root;
    p.field = tsa::RegressionField::linear(root, slope);
    p.step = tsa::StepSizePolicy::custom([gamma](StepIndex, const Vector&) { return gamma; });
    p.noise = tsa::NoiseField::gaussian(sigma);
    const auto lyap = tsa::QuadraticLyapunov::custom(
        [c_prev, c_curr, t](StepIndex s) { return s == t ? c_curr : c_prev; });
    const double k_closed = tsa::decrement_k(p, lyap, root, t, uvec);

    tsa::RandomStream stream(tsa::derive_seed(1012, static_cast<std::uint64_t>(k)));
    const Vector drift = p.field(t, root + uvec);
    const double v_prev = uvec.dot(c_prev * uvec);
    double mean = 0.0, m2 = 0.0;
    for (int d = 1; d <= kDraws; ++d) {
      const Vector eps = p.noise.sample(t, root + uvec, stream);
      const Vector next = uvec + gamma * (drift + eps);
      const double x = next.dot(c_curr * next) - v_prev;
      const double delta = x - mean;
      mean += delta / d;
      m2 += delta * (x - mean);
    }
    const double se = std::sqrt(m2 / (kDraws - 1) / kDraws);
    const double z = std::abs(k_closed - mean) / se;
    worst_z = std::max(worst_z, z);
    if (z <= 3.0) ++within;
  }
  std::ostringstream s;
  s << within << "/20 instances within 3 SE (max |z| = " << worst_z << ")";
  return {within == 20, s.str()};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "projection oracle", projection_oracle},
      {2, "sphere projection C-norm monotonicity", cnorm_monotonicity},
      {3, "Sherman-Morrison inverse information", sherman_morrison_consistency},
      {4, "G1 matrix identity", g1_identity},
      {5, "rate link, a_t = t^(3/4)", [] { return scenario("rate_link.json", 120.0); }},
      {6, "harmonic rate", [] { return scenario("harmonic_rate.json"); }},
      {7, "polynomial truncation vs untruncated", [] { return scenario("polynomial.json"); }},
      {8, "RLS rate, stationary AR(1)", [] { return scenario("ar_rls.json"); }},
      {9, "growing-variance innovations", [] { return scenario("ar_growing.json"); }},
      {10, "gaussian RML equals RLS", gaussian_rml_is_rls},
      {11, "gain partial sums", adt_sums},
      {12, "quadratic decrement vs Monte Carlo", decrement_monte_carlo},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s [%2d] %s: %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
