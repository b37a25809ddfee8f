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

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tsa/core.hpp"
#include "tsa/diagnostics.hpp"
#include "tsa/engine.hpp"
#include "tsa/estimators.hpp"

namespace tsa {

// Invalid or inconsistent scenario configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScenarioKind {
  kPolynomial,
  kRateLink,
  kHarmonicRate,
  kArRls,
  kArRml,
  kArRobust,
  kLinear,
};

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(const std::string& name);
const std::vector<std::string>& scenario_names();

// Declared acceptance thresholds. An absent value disables the check.
struct CheckThresholds {
  std::optional<double> convergence_radius;
  std::optional<double> min_convergence_fraction;
  std::optional<double> min_divergence_fraction;
  std::optional<double> max_median_ratio;
  std::optional<double> max_tail_slope;
  std::optional<double> min_rate_exponent;
  std::optional<double> target_tail_slope;
  double tail_slope_tolerance = 0.15;
  std::optional<double> max_info_distance;
  std::optional<double> max_g1_eigenvalue;
  std::optional<double> max_rls_discrepancy;
  bool drift_conditions = true;
};

struct ProbeGrid {
  Vector lower;
  Vector upper;
  int points = 41;

  std::vector<Vector> expand() const;
};

struct ARSettings {
  ARModel model;
  // Boundedness deltas: statistics use the exponent 1 - delta.
  std::vector<double> deltas;
  double kappa_exponent = 1.0;
  double inv_info0 = 1.0;
  double huber_factor = 1.345;
  // Robust variant truncation: none, box or shrinking-sphere around the RLS
  // estimate.
  nlohmann::json truncation = nlohmann::json::object();
};

struct LinearSettings {
  std::string construction = "rls";  // rls | zero-beta
  double gamma_scale = 1.0;           // zero-beta: constant gamma
  double h_sigma = 0.0;               // zero-beta: noise in h_t
  double a_exponent = 0.0;            // a_t = t^a_exponent
};

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::kPolynomial;
  StepIndex horizon = 10000;
  std::size_t replications = 100;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double overflow_bound = 1e12;

  Vector start;
  Vector root;
  nlohmann::json noise;
  nlohmann::json step;
  nlohmann::json field;
  nlohmann::json truncation;
  bool untruncated_comparison = false;
  std::vector<double> compare_exponents;

  std::vector<double> deltas;
  RateOptions rates;
  CheckThresholds checks;
  std::vector<DriftCondition> conditions;
  ProbeGrid grid;
  TimeRange condition_steps{1, 100, 1};
  StepIndex condition_t_min = 1;

  ARSettings ar;
  LinearSettings linear;

  StepIndex trajectory_stride = 1;
  nlohmann::json source;

  static ScenarioConfig from_json(const nlohmann::json& j,
                                  std::optional<ScenarioKind> forced = std::nullopt);
  static ScenarioConfig load(const std::string& path,
                             std::optional<ScenarioKind> forced = std::nullopt);
  void validate() const;
};

// Builders exposed so tools and tests share the config semantics.
NoiseField make_noise(const nlohmann::json& spec, const Vector& root);
StepSizePolicy make_step(const nlohmann::json& spec);
RegressionField make_field(const nlohmann::json& spec, const Vector& root);
TruncationSchedule make_schedule(const nlohmann::json& spec, Eigen::Index dim);
SAProblem make_problem(const ScenarioConfig& config);

struct CheckResult {
  std::string name;
  std::string statistic;
  double value = 0.0;
  std::string comparison;  // "<=", ">=", "<", "within"
  double threshold = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string description;
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct ScenarioReport {
  std::string scenario;
  nlohmann::json config;
  std::vector<std::string> warnings;
  nlohmann::json summary = nlohmann::json::object();
  std::optional<RateReport> rates;
  std::vector<DriftReport> conditions;
  std::vector<CheckResult> checks;
  Table trajectory;
  Table rate_rows;

  bool passed() const;
  nlohmann::json to_json() const;
};

ScenarioReport run_polynomial(const ScenarioConfig& config);
ScenarioReport run_rate_link(const ScenarioConfig& config);
ScenarioReport run_ar(const ScenarioConfig& config);
ScenarioReport run_linear(const ScenarioConfig& config);
ScenarioReport run_scenario(const ScenarioConfig& config);

// Evaluates drift conditions for the field and truncation of a config.
std::vector<DriftReport> run_condition_checks(const ScenarioConfig& config,
                                              const std::vector<DriftCondition>& conditions);

nlohmann::json to_json(const RateReport& report);
nlohmann::json to_json(const DriftReport& report, bool include_rows = false);

}  // namespace tsa
