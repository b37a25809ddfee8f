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

#include "tsa/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tsa/parallel.hpp"

namespace tsa {

using nlohmann::json;

namespace {

const std::vector<std::pair<ScenarioKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ScenarioKind, std::string>> names = {
      {ScenarioKind::kPolynomial, "polynomial"},   {ScenarioKind::kRateLink, "rate-link"},
      {ScenarioKind::kHarmonicRate, "harmonic-rate"}, {ScenarioKind::kArRls, "ar-rls"},
      {ScenarioKind::kArRml, "ar-rml"},            {ScenarioKind::kArRobust, "ar-robust"},
      {ScenarioKind::kLinear, "linear"},
  };
  return names;
}

bool is_ar(ScenarioKind kind) {
  return kind == ScenarioKind::kArRls || kind == ScenarioKind::kArRml ||
         kind == ScenarioKind::kArRobust;
}

Vector to_vector(const json& j, Eigen::Index dim, const std::string& what) {
  if (j.is_number()) return Vector::Constant(dim, j.get<double>());
  if (!j.is_array()) throw ConfigError(what + ": expected a number or an array");
  if (static_cast<Eigen::Index>(j.size()) != dim) {
    throw ConfigError(what + ": expected " + std::to_string(dim) + " entries");
  }
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

Vector to_vector(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a non-empty array");
  return to_vector(j, static_cast<Eigen::Index>(j.size()), what);
}

std::string family_of(const json& spec, const std::string& what) {
  if (!spec.is_object() || !spec.contains("family") || !spec["family"].is_string()) {
    throw ConfigError(what + ": missing \"family\"");
  }
  return spec["family"].get<std::string>();
}

double number(const json& spec, const char* key, double fallback) {
  if (!spec.contains(key)) return fallback;
  if (!spec[key].is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return spec[key].get<double>();
}

double required_number(const json& spec, const char* key, const std::string& what) {
  if (!spec.contains(key) || !spec[key].is_number()) {
    throw ConfigError(what + ": missing numeric \"" + key + "\"");
  }
  return spec[key].get<double>();
}

// Key absent -> fallback, explicit null -> disabled.
std::optional<double> threshold(const json& checks, const char* key, std::optional<double> fallback) {
  if (!checks.contains(key)) return fallback;
  if (checks[key].is_null()) return std::nullopt;
  if (!checks[key].is_number()) throw ConfigError(std::string("checks.") + key + " must be a number or null");
  return checks[key].get<double>();
}

std::vector<double> number_list(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(what + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Innovation parse_innovation(const json& spec) {
  const std::string family = family_of(spec, "ar.innovation");
  if (family == "none") return Innovation::none();
  if (family == "gaussian") return Innovation::gaussian(number(spec, "sigma", 1.0));
  if (family == "student") {
    return Innovation::student(required_number(spec, "dof", "student innovation"),
                               number(spec, "scale", 1.0));
  }
  if (family == "gaussian-growing") {
    return Innovation::gaussian_growing(number(spec, "sigma", 1.0),
                                        required_number(spec, "exponent", "growing innovation"));
  }
  throw ConfigError("unknown innovation family '" + family + "'");
}

bool ar_stationary(const Vector& theta) {
  const Eigen::Index m = theta.size();
  Matrix companion = Matrix::Zero(m, m);
  companion.row(0) = theta.transpose();
  for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Matrix> eig(companion, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kind_names()) {
    if (k == kind) return name;
  }
  return "polynomial";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names()) {
    if (n == name) return k;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& kn : kind_names()) out.push_back(kn.second);
    return out;
  }();
  return names;
}

std::vector<Vector> ProbeGrid::expand() const {
  const Eigen::Index m = lower.size();
  require(m >= 1 && upper.size() == m, "probe grid: bounds");
  require(points >= 1, "probe grid: points must be >= 1");
  std::vector<Vector> out;
  std::vector<int> idx(static_cast<std::size_t>(m), 0);
  while (true) {
    Vector z(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double f = points == 1 ? 0.5 : static_cast<double>(idx[i]) / (points - 1);
      z[i] = lower[i] + f * (upper[i] - lower[i]);
    }
    out.push_back(std::move(z));
    Eigen::Index k = 0;
    while (k < m && ++idx[static_cast<std::size_t>(k)] == points) {
      idx[static_cast<std::size_t>(k)] = 0;
      ++k;
    }
    if (k == m) break;
  }
  return out;
}

ScenarioConfig ScenarioConfig::from_json(const json& j, std::optional<ScenarioKind> forced) {
  if (!j.is_object()) throw ConfigError("configuration root must be an object");
  // Mirrors the top-level properties of the shipped schema; catches typos.
  static const std::set<std::string> kTopLevelKeys = {
      "scenario", "horizon", "replications", "seed", "workers", "overflow_bound",
      "dimension", "root", "start", "field", "step", "noise", "truncation",
      "untruncated_comparison", "compare_exponents", "rates", "checks", "conditions",
      "probe_grid", "condition_steps", "ar", "linear", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!kTopLevelKeys.contains(key)) throw ConfigError("unknown configuration key '" + key + "'");
  }
  ScenarioConfig c;
  c.source = j;
  try {
    if (j.contains("scenario")) {
      const ScenarioKind declared = parse_scenario_kind(j["scenario"].get<std::string>());
      if (forced && *forced != declared) {
        throw ConfigError("configuration declares scenario '" + to_string(declared) +
                          "' but '" + to_string(*forced) + "' was requested");
      }
      c.kind = declared;
    } else if (forced) {
      c.kind = *forced;
    } else {
      throw ConfigError("configuration does not name a scenario");
    }

    c.horizon = j.value("horizon", StepIndex{10000});
    c.replications = j.value("replications", std::size_t{100});
    c.seed = j.value("seed", std::uint64_t{1});
    c.workers = j.value("workers", 0u);
    c.overflow_bound = j.value("overflow_bound", 1e12);

    const auto dim = j.value("dimension", Eigen::Index{1});
    if (dim < 1) throw ConfigError("dimension must be >= 1");
    c.root = to_vector(j.value("root", json(0.0)), dim, "root");
    c.start = to_vector(j.value("start", json(0.0)), dim, "start");
    c.noise = j.value("noise", json{{"family", "gaussian"}, {"sigma", 1.0}});
    c.step = j.value("step", json{{"family", "harmonic"}});
    c.field = j.value("field", json{{"family", "linear"}, {"slope", 1.0}});
    c.truncation = j.value("truncation", json{{"family", "none"}});
    c.untruncated_comparison = j.value("untruncated_comparison", false);
    if (j.contains("compare_exponents")) {
      c.compare_exponents = number_list(j["compare_exponents"], "compare_exponents");
    }

    const json rates = j.value("rates", json::object());
    if (rates.contains("deltas")) c.deltas = number_list(rates["deltas"], "rates.deltas");
    c.rates.tail_fraction = number(rates, "tail_fraction", 0.5);
    if (rates.contains("early_window")) {
      auto w = number_list(rates["early_window"], "rates.early_window");
      if (w.size() != 2) throw ConfigError("rates.early_window needs two fractions");
      c.rates.early_lo = w[0];
      c.rates.early_hi = w[1];
    }
    if (rates.contains("late_window")) {
      auto w = number_list(rates["late_window"], "rates.late_window");
      if (w.size() != 2) throw ConfigError("rates.late_window needs two fractions");
      c.rates.late_lo = w[0];
      c.rates.late_hi = w[1];
    }

    const json checks = j.value("checks", json::object());
    auto& t = c.checks;
    switch (c.kind) {
      case ScenarioKind::kPolynomial:
        t.convergence_radius = threshold(checks, "convergence_radius", 0.1);
        t.min_convergence_fraction = threshold(checks, "min_convergence_fraction", 0.95);
        t.min_divergence_fraction = threshold(
            checks, "min_divergence_fraction",
            c.untruncated_comparison ? std::optional<double>(0.5) : std::nullopt);
        t.max_median_ratio = threshold(checks, "max_median_ratio", std::nullopt);
        break;
      case ScenarioKind::kRateLink:
        t.max_median_ratio = threshold(checks, "max_median_ratio", 1.5);
        t.max_tail_slope = threshold(checks, "max_tail_slope", std::nullopt);
        t.min_rate_exponent = threshold(checks, "min_rate_exponent", std::nullopt);
        break;
      case ScenarioKind::kHarmonicRate:
        t.target_tail_slope = threshold(checks, "target_tail_slope", -1.0);
        t.max_median_ratio = threshold(checks, "max_median_ratio", std::nullopt);
        break;
      case ScenarioKind::kArRls:
      case ScenarioKind::kArRml:
      case ScenarioKind::kArRobust:
        t.max_median_ratio = threshold(checks, "max_median_ratio", 1.5);
        t.target_tail_slope = threshold(checks, "target_tail_slope", std::nullopt);
        t.max_info_distance = threshold(checks, "max_info_distance", std::nullopt);
        break;
      case ScenarioKind::kLinear:
        t.max_g1_eigenvalue = threshold(checks, "max_g1_eigenvalue", 1e-10);
        t.max_rls_discrepancy = threshold(checks, "max_rls_discrepancy", 1e-8);
        break;
    }
    t.tail_slope_tolerance = number(checks, "tail_slope_tolerance", 0.15);
    if (!t.convergence_radius) t.convergence_radius = threshold(checks, "convergence_radius", std::nullopt);
    t.drift_conditions = checks.value("drift_conditions", true);

    if (j.contains("conditions")) {
      for (const auto& name : j["conditions"]) {
        c.conditions.push_back(parse_drift_condition(name.get<std::string>()));
      }
    } else {
      switch (c.kind) {
        case ScenarioKind::kPolynomial:
          c.conditions = {DriftCondition::kH1, DriftCondition::kB1};
          break;
        case ScenarioKind::kRateLink:
          c.conditions = {DriftCondition::kD1, DriftCondition::kB1};
          break;
        case ScenarioKind::kHarmonicRate:
          c.conditions = {DriftCondition::kD1, DriftCondition::kY1};
          break;
        default:
          break;
      }
    }
    const json grid = j.value("probe_grid", json::object());
    c.grid.lower = grid.contains("lower") ? to_vector(grid["lower"], dim, "probe_grid.lower")
                                          : (c.root.array() - 1.0).matrix();
    c.grid.upper = grid.contains("upper") ? to_vector(grid["upper"], dim, "probe_grid.upper")
                                          : (c.root.array() + 1.0).matrix();
    c.grid.points = grid.value("points", 41);
    const json steps = j.value("condition_steps", json::object());
    c.condition_steps.first = steps.value("first", StepIndex{1});
    c.condition_steps.last = steps.value("last", StepIndex{100});
    c.condition_steps.stride = steps.value("stride", StepIndex{1});
    c.condition_t_min = steps.value("t_min", StepIndex{1});

    if (j.contains("ar")) {
      const json& a = j["ar"];
      if (!a.contains("theta")) throw ConfigError("ar.theta is required");
      c.ar.model.theta = to_vector(a["theta"], "ar.theta");
      c.ar.model.innovation =
          parse_innovation(a.value("innovation", json{{"family", "gaussian"}, {"sigma", 1.0}}));
      if (a.contains("presample")) {
        c.ar.model.presample = to_vector(a["presample"], c.ar.model.theta.size(), "ar.presample");
      }
      if (a.contains("deltas")) c.ar.deltas = number_list(a["deltas"], "ar.deltas");
      c.ar.kappa_exponent = number(a, "kappa_exponent", 1.0);
      c.ar.inv_info0 = number(a, "inv_info0", 1.0);
      c.ar.huber_factor = number(a, "huber_factor", 1.345);
      c.ar.truncation = a.value("truncation", json{{"family", "none"}});
    } else if (is_ar(c.kind) || c.kind == ScenarioKind::kLinear) {
      c.ar.model.theta = Vector::Constant(1, 0.5);
      c.ar.model.innovation = Innovation::gaussian(1.0);
    }

    if (j.contains("linear")) {
      const json& l = j["linear"];
      c.linear.construction = l.value("construction", std::string("rls"));
      c.linear.gamma_scale = number(l, "gamma_scale", 1.0);
      c.linear.h_sigma = number(l, "h_sigma", 0.0);
      c.linear.a_exponent = number(l, "a_exponent", 0.0);
    }

    c.trajectory_stride = j.value("output", json::object()).value("trajectory_stride", StepIndex{1});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

ScenarioConfig ScenarioConfig::load(const std::string& path, std::optional<ScenarioKind> forced) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path + "'");
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return from_json(j, forced);
}

void ScenarioConfig::validate() const {
  if (horizon < 10) throw ConfigError("horizon must be >= 10");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!(overflow_bound > 0.0)) throw ConfigError("overflow_bound must be positive");
  if (!(rates.tail_fraction > 0.0 && rates.tail_fraction < 1.0)) {
    throw ConfigError("rates.tail_fraction must lie in (0, 1)");
  }
  if (!(rates.early_lo > 0.0 && rates.early_lo < rates.early_hi &&
        rates.early_hi <= rates.late_lo && rates.late_lo < rates.late_hi && rates.late_hi <= 1.0)) {
    throw ConfigError("rates windows must satisfy 0 < early_lo < early_hi <= late_lo < late_hi <= 1");
  }
  if (trajectory_stride < 1) throw ConfigError("output.trajectory_stride must be >= 1");
  if (!(checks.tail_slope_tolerance >= 0.0)) {
    throw ConfigError("checks.tail_slope_tolerance must be non-negative");
  }
  try {
    if (kind == ScenarioKind::kRateLink || kind == ScenarioKind::kHarmonicRate ||
        kind == ScenarioKind::kPolynomial) {
      make_problem(*this);
    }
    if (kind == ScenarioKind::kRateLink) {
      const std::string f = family_of(step, "step");
      if (f != "harmonic" && f != "power") throw ConfigError("rate-link needs a scalar power step");
      const double eps = f == "harmonic" ? 1.0 : required_number(step, "exponent", "step");
      if (!(eps > 0.5 && eps <= 1.0)) throw ConfigError("rate-link step exponent must lie in (1/2, 1]");
      for (double e : compare_exponents) {
        if (!(e > 0.5 && e <= 1.0)) throw ConfigError("compare_exponents must lie in (1/2, 1]");
      }
    }
    if (kind == ScenarioKind::kHarmonicRate) {
      if (family_of(step, "step") != "harmonic") throw ConfigError("harmonic-rate uses harmonic steps");
      if (root.size() != 1) throw ConfigError("harmonic-rate is one-dimensional");
    }
    if (kind == ScenarioKind::kPolynomial) {
      if (family_of(field, "field") != "polynomial") throw ConfigError("polynomial scenario needs a polynomial field");
      const std::string tf = family_of(truncation, "truncation");
      if (tf != "power" && tf != "log" && tf != "none") {
        throw ConfigError("polynomial truncation must be power, log or none");
      }
      const auto coeffs = number_list(field.value("coefficients", json::array()), "field.coefficients");
      if (!deltas.empty() && (coeffs.empty() || coeffs[0] < 0.5)) {
        throw ConfigError("rate statistics need C_1 >= 1/2");
      }
    }
    if (is_ar(kind) || kind == ScenarioKind::kLinear) {
      ar.model.validate();
      if (!(ar.inv_info0 > 0.0)) throw ConfigError("ar.inv_info0 must be positive");
      for (double d : ar.deltas) {
        if (!(d >= 0.0 && d <= 1.0)) throw ConfigError("ar.deltas must lie in [0, 1]");
      }
      if (kind == ScenarioKind::kArRobust) {
        const std::string tf = family_of(ar.truncation, "ar.truncation");
        if (tf != "none" && tf != "box" && tf != "sphere" && tf != "shrinking-sphere") {
          throw ConfigError("ar.truncation must be none, box, sphere or shrinking-sphere");
        }
        if (!(ar.huber_factor > 0.0)) throw ConfigError("ar.huber_factor must be positive");
      }
    }
    if (kind == ScenarioKind::kLinear) {
      if (linear.construction != "rls" && linear.construction != "zero-beta") {
        throw ConfigError("linear.construction must be rls or zero-beta");
      }
      if (!(linear.gamma_scale > 0.0)) throw ConfigError("linear.gamma_scale must be positive");
    }
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

NoiseField make_noise(const json& spec, const Vector& root) {
  const std::string f = family_of(spec, "noise");
  if (f == "none") return NoiseField::none();
  if (f == "gaussian") return NoiseField::gaussian(number(spec, "sigma", 1.0));
  if (f == "student") {
    return NoiseField::student(required_number(spec, "dof", "student noise"), number(spec, "scale", 1.0));
  }
  if (f == "state-scaled") return NoiseField::state_scaled(number(spec, "sigma", 1.0), root);
  if (f == "variance-growth") {
    return NoiseField::variance_growth(number(spec, "sigma", 1.0),
                                       required_number(spec, "exponent", "variance-growth noise"));
  }
  throw ConfigError("unknown noise family '" + f + "'");
}

StepSizePolicy make_step(const json& spec) {
  const std::string f = family_of(spec, "step");
  if (f == "harmonic") return StepSizePolicy::harmonic();
  if (f == "power") return StepSizePolicy::power_decay(required_number(spec, "exponent", "power step"));
  throw ConfigError("unknown step family '" + f + "'");
}

RegressionField make_field(const json& spec, const Vector& root) {
  const std::string f = family_of(spec, "field");
  if (f == "linear") return RegressionField::linear(root, number(spec, "slope", 1.0));
  if (f == "polynomial") {
    if (root.size() != 1) throw ConfigError("polynomial field is one-dimensional");
    return RegressionField::polynomial(
        number_list(spec.value("coefficients", json::array()), "field.coefficients"), root[0]);
  }
  throw ConfigError("unknown field family '" + f + "'");
}

TruncationSchedule make_schedule(const json& spec, Eigen::Index dim) {
  const std::string f = family_of(spec, "truncation");
  const Vector center = spec.contains("center") ? to_vector(spec["center"], dim, "truncation.center")
                                                : Vector::Zero(dim);
  if (f == "none") return TruncationSchedule::constant(Region::whole_space());
  if (f == "box") {
    return TruncationSchedule::constant(
        Region::box(to_vector(spec.at("lower"), dim, "truncation.lower"),
                    to_vector(spec.at("upper"), dim, "truncation.upper")));
  }
  if (f == "sphere") {
    return TruncationSchedule::constant(
        Region::sphere(center, required_number(spec, "radius", "sphere truncation")));
  }
  if (f == "log") {
    return TruncationSchedule::log_box(number(spec, "C", 5.0), number(spec, "shift", 2.0), center);
  }
  if (f == "power") {
    return TruncationSchedule::power_box(number(spec, "C", 5.0), number(spec, "r", 0.9),
                                         static_cast<int>(number(spec, "l", 1.0)), center);
  }
  if (f == "shrinking-sphere") {
    return TruncationSchedule::shrinking_sphere(number(spec, "delta0", 1.0), number(spec, "decay", 0.25));
  }
  throw ConfigError("unknown truncation family '" + f + "'");
}

SAProblem make_problem(const ScenarioConfig& config) {
  SAProblem p;
  p.start = config.start;
  p.root = config.root;
  p.step = make_step(config.step);
  p.field = make_field(config.field, config.root);
  p.noise = make_noise(config.noise, config.root);
  p.schedule = make_schedule(config.truncation, config.root.size());
  if (p.schedule.needs_auxiliary()) {
    throw ConfigError("data-driven truncation is only available for the ar-robust scenario");
  }
  p.overflow_bound = config.overflow_bound;
  p.validate();
  return p;
}

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

json to_json(const RateReport& r) {
  json j;
  j["replications"] = r.replications;
  j["horizon"] = r.horizon;
  j["tail_window"] = {r.tail_first, r.tail_last};
  j["tail_slope"] = r.slope;
  j["tail_intercept"] = r.intercept;
  j["rate_exponent"] = -0.5 * r.slope;
  j["fit_points"] = r.fit_points;
  j["excluded_zero_points"] = r.excluded_zero;
  j["replication_slope"] = {{"median", r.median_rep_slope},
                            {"q10", r.q10_rep_slope},
                            {"q90", r.q90_rep_slope}};
  json b = json::array();
  for (const auto& s : r.boundedness) {
    b.push_back({{"exponent", s.delta},
                 {"early_window", {s.early_first, s.early_last}},
                 {"late_window", {s.late_first, s.late_last}},
                 {"median_ratio", s.median_ratio},
                 {"q10_ratio", s.q10_ratio},
                 {"q90_ratio", s.q90_ratio},
                 {"median_late_sup", s.median_late_sup}});
  }
  j["boundedness"] = b;
  return j;
}

json to_json(const DriftReport& r, bool include_rows) {
  json j;
  j["condition"] = r.rows.empty() ? std::string() : to_string(r.rows.front().condition);
  j["evaluated"] = r.rows.size();
  j["violations"] = r.violations;
  j["early_violations"] = r.early_violations;
  j["skipped"] = r.skipped;
  j["passed"] = r.passed();
  if (include_rows) {
    json rows = json::array();
    for (const auto& row : r.rows) {
      rows.push_back({{"t", row.t},
                      {"grid_point", std::vector<double>(row.grid_point.data(),
                                                         row.grid_point.data() + row.grid_point.size())},
                      {"value", row.value},
                      {"threshold", row.threshold},
                      {"ok", row.ok}});
    }
    j["rows"] = rows;
  }
  return j;
}

json ScenarioReport::to_json() const {
  json j;
  j["scenario"] = scenario;
  j["config"] = config;
  j["warnings"] = warnings;
  j["summary"] = summary;
  if (rates) j["rates"] = tsa::to_json(*rates);
  json conds = json::array();
  for (const auto& c : conditions) conds.push_back(tsa::to_json(c));
  j["conditions"] = conds;
  json cs = json::array();
  for (const auto& c : checks) {
    json item = {{"name", c.name},           {"statistic", c.statistic},
                 {"value", c.value},         {"comparison", c.comparison},
                 {"threshold", c.threshold}, {"passed", c.passed},
                 {"description", c.description}};
    if (c.comparison == "within") item["tolerance"] = c.tolerance;
    cs.push_back(item);
  }
  j["checks"] = cs;
  j["passed"] = passed();
  return j;
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

CheckResult check_le(std::string name, std::string statistic, double value, double threshold,
                     std::string description) {
  return {std::move(name), std::move(statistic), value, "<=", threshold, 0.0,
          value <= threshold, std::move(description)};
}

CheckResult check_ge(std::string name, std::string statistic, double value, double threshold,
                     std::string description) {
  return {std::move(name), std::move(statistic), value, ">=", threshold, 0.0,
          value >= threshold, std::move(description)};
}

CheckResult check_within(std::string name, std::string statistic, double value, double target,
                         double tolerance, std::string description) {
  return {std::move(name), std::move(statistic), value, "within", target, tolerance,
          std::abs(value - target) <= tolerance, std::move(description)};
}

StepIndex record_start(const ScenarioConfig& c) {
  const double f = std::min(c.rates.tail_fraction, c.rates.early_lo);
  return std::max<StepIndex>(1, static_cast<StepIndex>(std::floor(f * static_cast<double>(c.horizon))));
}

void add_rate_checks(ScenarioReport& report, const ScenarioConfig& c, const RateReport& rates,
                     const std::string& stat_label) {
  const auto& t = c.checks;
  if (t.max_median_ratio) {
    for (const auto& b : rates.boundedness) {
      report.checks.push_back(check_le(
          "boundedness_ratio[t^" + fmt(b.delta) + "]", "median sup-ratio of t^" + fmt(b.delta) + " * " + stat_label,
          b.median_ratio, *t.max_median_ratio,
          "late/early window sup ratio of the scaled squared error; a finite limit keeps it near or below 1"));
    }
  }
  if (t.max_tail_slope) {
    report.checks.push_back(check_le("tail_slope", "log-log slope of mean " + stat_label, rates.slope,
                                     *t.max_tail_slope, "pooled tail slope of the mean squared error"));
  }
  if (t.min_rate_exponent) {
    report.checks.push_back(check_ge("rate_exponent", "-slope/2", -0.5 * rates.slope, *t.min_rate_exponent,
                                     "convergence rate exponent of the error norm"));
  }
  if (t.target_tail_slope) {
    report.checks.push_back(check_within("tail_slope", "log-log slope of mean " + stat_label, rates.slope,
                                         *t.target_tail_slope, t.tail_slope_tolerance,
                                         "pooled tail slope of the mean squared error"));
  }
}

void add_rate_rows(ScenarioReport& report, const RateReport& rates) {
  report.rate_rows.header = {"rep", "exponent", "early_sup", "late_sup", "ratio", "rep_slope"};
  for (std::size_t k = 0; k < rates.boundedness.size(); ++k) {
    const auto& b = rates.boundedness[k];
    for (std::size_t r = 0; r < b.ratio.size(); ++r) {
      report.rate_rows.rows.push_back({static_cast<double>(r), b.delta, b.early_sup[r], b.late_sup[r],
                                       b.ratio[r], rates.rep_slopes[r]});
    }
  }
  if (rates.boundedness.empty()) {
    for (std::size_t r = 0; r < rates.rep_slopes.size(); ++r) {
      report.rate_rows.rows.push_back({static_cast<double>(r), std::nan(""), std::nan(""), std::nan(""),
                                       std::nan(""), rates.rep_slopes[r]});
    }
  }
}

void add_condition_checks(ScenarioReport& report, const ScenarioConfig& c) {
  if (c.conditions.empty()) return;
  report.conditions = run_condition_checks(c, c.conditions);
  if (!c.checks.drift_conditions) return;
  for (const auto& d : report.conditions) {
    const std::string name = d.rows.empty() ? "?" : to_string(d.rows.front().condition);
    report.checks.push_back(check_le("condition:" + name, "violations for t >= t_min",
                                     static_cast<double>(d.violations), 0.0,
                                     "literal inequality evaluated on the probe grid"));
  }
}

Table trajectory_table(const Trajectory& tr) {
  Table table;
  table.header.push_back("t");
  for (Eigen::Index i = 0; i < tr.dim; ++i) table.header.push_back("z_" + std::to_string(i + 1));
  table.header.push_back("norm2");
  table.header.push_back("projected");
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::vector<double> row{static_cast<double>(tr.steps[k])};
    for (Eigen::Index i = 0; i < tr.dim; ++i) row.push_back(tr.states[k * tr.dim + i]);
    row.push_back(tr.norm2.empty() ? std::nan("") : tr.norm2[k]);
    row.push_back(tr.projected[k]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct SaRep {
  TerminalStatus status = TerminalStatus::kCompleted;
  StepIndex status_step = 0;
  double final_error = 0.0;
  ErrorSeries series;
};

std::vector<SaRep> run_sa_reps(const SAProblem& problem, const ScenarioConfig& c, bool keep_series) {
  const RecordOptions opt{keep_series ? record_start(c) : c.horizon, 1, false};
  return parallel_map(
      c.replications,
      [&](std::size_t r) {
        Trajectory tr = run(problem, c.horizon, derive_seed(c.seed, r), opt);
        SaRep rep;
        rep.status = tr.status;
        rep.status_step = tr.status_step;
        rep.final_error = (tr.final_state - c.root).norm();
        if (keep_series && tr.completed()) rep.series = ErrorSeries::from_trajectory(tr);
        return rep;
      },
      c.workers);
}

std::optional<RateReport> rates_from(const std::vector<SaRep>& reps, const ScenarioConfig& c,
                                     ScenarioReport& report) {
  std::vector<ErrorSeries> series;
  for (const auto& r : reps) {
    if (r.status != TerminalStatus::kCompleted) {
      report.warnings.push_back("rate statistics skipped: not every replication completed");
      report.checks.push_back(check_le("replications_completed", "incomplete replications", 1.0, 0.0,
                                       "rate statistics need completed trajectories"));
      return std::nullopt;
    }
    series.push_back(r.series);
  }
  return rate_fit(std::span<const ErrorSeries>(series), c.deltas, c.rates);
}

ScenarioReport base_report(const ScenarioConfig& c) {
  ScenarioReport report;
  report.scenario = to_string(c.kind);
  report.config = c.source;
  report.config["scenario"] = report.scenario;
  report.config["horizon"] = c.horizon;
  report.config["replications"] = c.replications;
  report.config["seed"] = c.seed;
  return report;
}

}  // namespace

std::vector<DriftReport> run_condition_checks(const ScenarioConfig& c,
                                              const std::vector<DriftCondition>& conditions) {
  const RegressionField field = make_field(c.field, c.root);
  const TruncationSchedule schedule = make_schedule(c.truncation, c.root.size());
  const StepSizePolicy step = make_step(c.step);
  const std::vector<Vector> grid = c.grid.expand();
  DriftOptions options;
  options.t_min = c.condition_t_min;
  options.a = [step](StepIndex t) { return t <= 0 ? 0.0 : step.gain(t); };
  std::vector<DriftReport> out;
  for (auto cond : conditions) {
    out.push_back(check_drift(field, schedule, c.root, cond, grid, c.condition_steps, options));
  }
  return out;
}

ScenarioReport run_polynomial(const ScenarioConfig& c) {
  ScenarioReport report = base_report(c);
  const SAProblem truncated = make_problem(c);
  const bool want_rates = !c.deltas.empty();
  const auto reps = run_sa_reps(truncated, c, want_rates);

  const double radius = c.checks.convergence_radius.value_or(0.1);
  std::size_t converged = 0, diverged = 0;
  std::vector<double> final_errors;
  for (const auto& r : reps) {
    if (r.status == TerminalStatus::kDiverged) ++diverged;
    if (r.status == TerminalStatus::kCompleted) {
      final_errors.push_back(r.final_error);
      if (r.final_error < radius) ++converged;
    }
  }
  const double n = static_cast<double>(c.replications);
  report.summary["convergence_radius"] = radius;
  report.summary["truncated"] = {{"converged_fraction", converged / n},
                                 {"diverged_fraction", diverged / n},
                                 {"median_final_error", final_errors.empty() ? std::nan("") : median(final_errors)}};
  if (c.checks.min_convergence_fraction) {
    report.checks.push_back(check_ge("truncated_convergence", "fraction with |Z_T - z0| < " + fmt(radius),
                                     converged / n, *c.checks.min_convergence_fraction,
                                     "truncated runs that end near the root"));
  }

  if (c.untruncated_comparison) {
    SAProblem free = truncated;
    free.schedule = TruncationSchedule::constant(Region::whole_space());
    ScenarioConfig no_rates = c;
    const auto free_reps = run_sa_reps(free, no_rates, false);
    std::size_t free_div = 0, free_conv = 0;
    for (const auto& r : free_reps) {
      if (r.status == TerminalStatus::kDiverged) ++free_div;
      if (r.status == TerminalStatus::kCompleted && r.final_error < radius) ++free_conv;
    }
    report.summary["untruncated"] = {{"converged_fraction", free_conv / n},
                                     {"diverged_fraction", free_div / n},
                                     {"paired_streams", true}};
    if (c.checks.min_divergence_fraction) {
      report.checks.push_back(check_ge("untruncated_divergence", "fraction hitting the overflow bound",
                                       free_div / n, *c.checks.min_divergence_fraction,
                                       "paired untruncated runs on identical noise streams"));
    }
  }

  if (want_rates) {
    report.rates = rates_from(reps, c, report);
    if (report.rates) {
      add_rate_checks(report, c, *report.rates, "|Z_t - z0|^2");
      add_rate_rows(report, *report.rates);
    }
  }
  add_condition_checks(report, c);
  const Trajectory first = run(truncated, c.horizon, derive_seed(c.seed, 0), {1, c.trajectory_stride, true});
  report.trajectory = trajectory_table(first);
  return report;
}

ScenarioReport run_rate_link(const ScenarioConfig& c) {
  ScenarioReport report = base_report(c);
  const SAProblem problem = make_problem(c);
  const auto reps = run_sa_reps(problem, c, true);
  report.rates = rates_from(reps, c, report);
  const double eps = problem.step.exponent();
  report.summary["step_exponent"] = eps;
  report.summary["delta_bound"] = 2.0 - 1.0 / eps;
  report.summary["rate_exponent_bound"] = 1.0 - 1.0 / (2.0 * eps);
  if (report.rates) {
    report.summary["rate_exponent"] = -0.5 * report.rates->slope;
    for (double d : c.deltas) {
      if (d >= 2.0 - 1.0 / eps) {
        report.warnings.push_back("delta " + fmt(d) + " is not below 2 - 1/eps; boundedness is not guaranteed");
      }
    }
    add_rate_checks(report, c, *report.rates, "|Z_t - z0|^2");
    add_rate_rows(report, *report.rates);
  }

  if (!c.compare_exponents.empty()) {
    json table = json::array();
    for (double e : c.compare_exponents) {
      ScenarioConfig alt = c;
      alt.step = json{{"family", "power"}, {"exponent", e}};
      SAProblem p = problem;
      p.step = StepSizePolicy::power_decay(e);
      const auto alt_reps = run_sa_reps(p, alt, true);
      ScenarioReport scratch;
      auto r = rates_from(alt_reps, alt, scratch);
      json row = {{"exponent", e}, {"delta_bound", 2.0 - 1.0 / e}, {"rate_exponent_bound", 1.0 - 1.0 / (2.0 * e)}};
      if (r) {
        row["tail_slope"] = r->slope;
        row["rate_exponent"] = -0.5 * r->slope;
        json ratios = json::array();
        for (const auto& b : r->boundedness) ratios.push_back({{"exponent", b.delta}, {"median_ratio", b.median_ratio}});
        row["boundedness"] = ratios;
      }
      table.push_back(row);
    }
    report.summary["exponent_comparison"] = table;
  }
  add_condition_checks(report, c);
  const Trajectory first = run(problem, c.horizon, derive_seed(c.seed, 0), {1, c.trajectory_stride, true});
  report.trajectory = trajectory_table(first);
  return report;
}

namespace {

struct ArRep {
  TerminalStatus status = TerminalStatus::kCompleted;
  StepIndex status_step = 0;
  ErrorSeries series;
  Vector theta_hat;
  double fisher_quadform = 0.0;
  double info_drift = 0.0;
  double info_distance = std::nan("");
  Table trace;
};

double fisher_weight(const ScenarioConfig& c, StepIndex t) {
  const Innovation& inn = c.ar.model.innovation;
  if (c.kind != ScenarioKind::kArRml) return 1.0;
  switch (inn.family) {
    case InnovationFamily::kGaussian:
    case InnovationFamily::kGaussianGrowing: return 1.0 / inn.variance(t);
    case InnovationFamily::kStudent: return 0.0;  // resolved once by quadrature
    case InnovationFamily::kNone: break;
  }
  throw ConfigError("ar-rml needs a non-degenerate innovation law");
}

std::optional<Matrix> stationary_information(const ScenarioConfig& c, double weight) {
  const ARModel& model = c.ar.model;
  if (model.innovation.family == InnovationFamily::kGaussianGrowing ||
      model.innovation.family == InnovationFamily::kNone) {
    return std::nullopt;
  }
  const double var = model.innovation.variance(1);
  const Eigen::Index m = model.order();
  if (model.theta.isZero(0.0)) return Matrix(weight * var * Matrix::Identity(m, m));
  if (m == 1) return Matrix::Constant(1, 1, weight * var / (1.0 - model.theta[0] * model.theta[0]));
  return std::nullopt;
}

ArRep run_ar_rep(const ScenarioConfig& c, std::size_t r, bool want_trace, double student_l) {
  const ARModel& model = c.ar.model;
  const Eigen::Index m = model.order();
  const StepIndex T = c.horizon;
  ArRep rep;
  const ARSeries data = simulate_ar(model, T, derive_seed(c.seed, r), c.overflow_bound);
  if (data.status != TerminalStatus::kCompleted) {
    rep.status = data.status;
    rep.status_step = data.status_step;
    return rep;
  }

  EstimatorState state = EstimatorState::initial(Vector::Zero(m), c.ar.inv_info0 * Matrix::Identity(m, m));
  EstimatorState aux_state = state;
  Matrix info = Matrix::Identity(m, m) / c.ar.inv_info0;
  Matrix info_half = info;
  const TruncationSchedule schedule =
      c.kind == ScenarioKind::kArRobust ? make_schedule(c.ar.truncation, m)
                                        : TruncationSchedule::constant(Region::whole_space());
  RunningMad mad;
  const double trace_delta = c.ar.deltas.empty() ? 0.0 : c.ar.deltas.front();

  const StepIndex from = record_start(c);
  rep.series.first = from;
  rep.series.stride = 1;
  rep.series.err2.reserve(static_cast<std::size_t>(T - from + 1));
  if (want_trace) {
    rep.trace.header.push_back("t");
    for (Eigen::Index i = 0; i < m; ++i) rep.trace.header.push_back("theta_hat_" + std::to_string(i + 1));
    rep.trace.header.push_back("stat_fisher_quadform");
    rep.trace.header.push_back("norm2_err");
  }

  for (StepIndex t = 1; t <= T; ++t) {
    const Vector x = data.regressor(t, m);
    const double obs = data.at(t);
    switch (c.kind) {
      case ScenarioKind::kArRml: {
        const double l = model.innovation.family == InnovationFamily::kStudent ? student_l : fisher_weight(c, t);
        const ScoreFn score = model.innovation.family == InnovationFamily::kStudent
                                  ? student_score(model.innovation.dof, model.innovation.sigma)
                                  : gaussian_score(std::sqrt(model.innovation.variance(t)));
        state = rml_step(state, x, obs, score, l);
        info += l * x * x.transpose();
        break;
      }
      case ScenarioKind::kArRobust: {
        const double residual = obs - x.dot(state.theta);
        // Predictable clip: scale estimated from earlier residuals only.
        const ScoreFn psi = mad.count() < 10 ? ScoreFn([](double u) { return u; })
                                             : huber_psi(std::max(c.ar.huber_factor * mad.scale(), 1e-12));
        mad.push(residual);
        aux_state = rls_step(aux_state, x, obs);
        EstimatorState with_inv = state;
        with_inv.inv_info = sherman_morrison(state.inv_info, x);
        const Vector* aux = schedule.needs_auxiliary() ? &aux_state.theta : nullptr;
        state = robust_step(with_inv, x, obs, psi, with_inv.inv_info, schedule, t, aux);
        info += x * x.transpose();
        break;
      }
      default:
        state = rls_step(state, x, obs);
        info += x * x.transpose();
        break;
    }
    if (!state.theta.allFinite()) {
      rep.status = TerminalStatus::kDiverged;
      rep.status_step = t;
      return rep;
    }
    const Vector err = state.theta - model.theta;
    const double e2 = err.squaredNorm();
    if (t >= from) rep.series.err2.push_back(e2);
    if (t == T / 2) info_half = info;
    if (want_trace && (t % c.trajectory_stride == 0 || t == T)) {
      const double kappa = std::pow(static_cast<double>(t), c.ar.kappa_exponent);
      std::vector<double> row{static_cast<double>(t)};
      for (Eigen::Index i = 0; i < m; ++i) row.push_back(state.theta[i]);
      row.push_back(std::pow(kappa, -trace_delta) * err.dot(info * err));
      row.push_back(e2);
      rep.trace.rows.push_back(std::move(row));
    }
  }
  const Vector err = state.theta - model.theta;
  const double kappa_T = std::pow(static_cast<double>(T), c.ar.kappa_exponent);
  rep.theta_hat = state.theta;
  rep.fisher_quadform = std::pow(kappa_T, -trace_delta) * err.dot(info * err);
  rep.info_drift = (info_half / static_cast<double>(T / 2) - info / static_cast<double>(T)).norm();
  const double weight = c.kind == ScenarioKind::kArRml
                            ? (model.innovation.family == InnovationFamily::kStudent ? student_l : fisher_weight(c, 1))
                            : 1.0;
  if (auto ref = stationary_information(c, weight)) {
    rep.info_distance = (info / static_cast<double>(T) - *ref).norm();
  }
  return rep;
}

}  // namespace

ScenarioReport run_ar(const ScenarioConfig& c) {
  if (!is_ar(c.kind)) throw ConfigError("run_ar called for a non-AR scenario");
  ScenarioReport report = base_report(c);
  const ARModel& model = c.ar.model;
  const bool stationary = ar_stationary(model.theta);
  if (!stationary) {
    report.warnings.push_back(
        "theta is not stationary: the I_t/t -> G assertion (kappa_t = t) is disabled for this run");
  }
  double student_l = 0.0;
  if (c.kind == ScenarioKind::kArRml && model.innovation.family == InnovationFamily::kStudent) {
    student_l = student_fisher(model.innovation.dof, model.innovation.sigma);
    report.summary["student_fisher_information"] = student_l;
  }

  auto reps = parallel_map(
      c.replications, [&](std::size_t r) { return run_ar_rep(c, r, r == 0, student_l); }, c.workers);

  std::vector<ErrorSeries> series;
  std::vector<double> quadforms, drifts, distances;
  std::size_t diverged = 0;
  for (auto& r : reps) {
    if (r.status != TerminalStatus::kCompleted) {
      ++diverged;
      continue;
    }
    series.push_back(std::move(r.series));
    quadforms.push_back(r.fisher_quadform);
    drifts.push_back(r.info_drift);
    if (!std::isnan(r.info_distance)) distances.push_back(r.info_distance);
  }
  report.trajectory = std::move(reps.front().trace);
  report.summary["stationary"] = stationary;
  report.summary["estimator"] = to_string(c.kind);
  report.summary["diverged_series"] = diverged;
  if (diverged > 0) {
    report.warnings.push_back(std::to_string(diverged) + " simulated series overflowed");
    report.checks.push_back(check_le("series_completed", "overflowed series", static_cast<double>(diverged), 0.0,
                                     "every simulated series must stay finite"));
    return report;
  }
  report.summary["median_fisher_quadform_T"] = median(quadforms);
  report.summary["median_info_drift"] = median(drifts);
  if (!distances.empty()) report.summary["median_info_distance"] = median(distances);

  std::vector<double> exponents;
  for (double d : c.ar.deltas) exponents.push_back(1.0 - d);
  report.rates = rate_fit(std::span<const ErrorSeries>(series), exponents, c.rates);
  add_rate_checks(report, c, *report.rates, "|theta_hat_t - theta|^2");
  add_rate_rows(report, *report.rates);
  if (c.checks.max_info_distance) {
    if (!stationary) {
      report.warnings.push_back("info-distance check skipped for a non-stationary model");
    } else if (distances.empty()) {
      report.warnings.push_back("info-distance check skipped: no closed-form stationary information");
    } else {
      report.checks.push_back(check_le("info_distance", "median |I_T/T - G|_F", median(distances),
                                       *c.checks.max_info_distance,
                                       "normalized information against its stationary limit"));
    }
  }
  return report;
}

ScenarioReport run_linear(const ScenarioConfig& c) {
  ScenarioReport report = base_report(c);
  const LinearSettings& ls = c.linear;

  struct LinRep {
    double max_g1 = -std::numeric_limits<double>::infinity();
    double rls_gap = 0.0;
    double stat_gap = 0.0;
    double stat_spread = 0.0;
    double final_stat = 0.0;
    TerminalStatus status = TerminalStatus::kCompleted;
    Table trace;
  };

  auto one = [&](std::size_t r) {
    LinRep rep;
    const bool trace = r == 0;
    if (trace) rep.trace.header = {"t", "stat", "g1_max_eigenvalue"};
    auto a_t = [&](StepIndex t) { return std::pow(static_cast<double>(t), ls.a_exponent); };

    if (ls.construction == "zero-beta") {
      const Eigen::Index m = c.root.size();
      const Matrix gamma = ls.gamma_scale * Matrix::Identity(m, m);
      const Matrix gamma_inv = gamma.inverse();
      const Matrix beta = Matrix::Zero(m, m);
      RandomStream stream(derive_seed(c.seed, r));
      Vector z = c.start;
      double first = 0.0;
      for (StepIndex t = 1; t <= c.horizon; ++t) {
        Vector h(m);
        for (Eigen::Index i = 0; i < m; ++i) h[i] = ls.h_sigma * stream.normal();
        z = linear_step(gamma, beta, z, h);
        const Matrix g1 = g1_matrix(gamma, gamma, beta);
        rep.max_g1 = std::max(rep.max_g1, Eigen::SelfAdjointEigenSolver<Matrix>(g1, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
        const Vector d = z - c.root;
        const double stat = d.dot(gamma_inv * d) / a_t(t);
        if (t == 1) first = stat;
        rep.stat_spread = std::max(rep.stat_spread, std::abs(stat - first));
        rep.final_stat = stat;
        if (trace && (t % c.trajectory_stride == 0 || t == c.horizon)) {
          rep.trace.rows.push_back({static_cast<double>(t), stat, rep.max_g1});
        }
      }
      return rep;
    }

    const ARModel& model = c.ar.model;
    const Eigen::Index m = model.order();
    const ARSeries data = simulate_ar(model, c.horizon, derive_seed(c.seed, r), c.overflow_bound);
    if (data.status != TerminalStatus::kCompleted) {
      rep.status = data.status;
      return rep;
    }
    Matrix gamma = c.ar.inv_info0 * Matrix::Identity(m, m);
    Matrix info = Matrix::Identity(m, m) / c.ar.inv_info0;
    Vector z = Vector::Zero(m);
    EstimatorState rls = EstimatorState::initial(z, gamma);
    for (StepIndex t = 1; t <= c.horizon; ++t) {
      const Vector x = data.regressor(t, m);
      const Matrix beta = x * x.transpose();
      const Matrix gamma_next = sherman_morrison(gamma, x);
      const Matrix g1 = g1_matrix(gamma, gamma_next, beta);
      rep.max_g1 = std::max(rep.max_g1, Eigen::SelfAdjointEigenSolver<Matrix>(g1, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff());
      z = linear_step(gamma_next, beta, z, x * data.at(t));
      gamma = gamma_next;
      info += beta;
      rls = rls_step(rls, x, data.at(t));
      rep.rls_gap = std::max(rep.rls_gap, (z - rls.theta).cwiseAbs().maxCoeff());
      const Vector d = z - model.theta;
      const Vector d_rls = rls.theta - model.theta;
      const double stat = d.dot(info * d) / a_t(t);
      const double stat_rls = d_rls.dot(info * d_rls) / a_t(t);
      rep.stat_gap = std::max(rep.stat_gap, std::abs(stat - stat_rls) / std::max(1.0, std::abs(stat_rls)));
      rep.final_stat = stat;
      if (trace && (t % c.trajectory_stride == 0 || t == c.horizon)) {
        rep.trace.rows.push_back({static_cast<double>(t), stat, rep.max_g1});
      }
    }
    return rep;
  };

  auto reps = parallel_map(c.replications, one, c.workers);
  double max_g1 = -std::numeric_limits<double>::infinity();
  double rls_gap = 0.0, stat_gap = 0.0, spread = 0.0;
  std::vector<double> finals;
  std::size_t diverged = 0;
  for (const auto& r : reps) {
    if (r.status != TerminalStatus::kCompleted) {
      ++diverged;
      continue;
    }
    max_g1 = std::max(max_g1, r.max_g1);
    rls_gap = std::max(rls_gap, r.rls_gap);
    stat_gap = std::max(stat_gap, r.stat_gap);
    spread = std::max(spread, r.stat_spread);
    finals.push_back(r.final_stat);
  }
  report.trajectory = std::move(reps.front().trace);
  report.summary["construction"] = ls.construction;
  report.summary["max_g1_eigenvalue"] = max_g1;
  report.summary["median_final_statistic"] = finals.empty() ? std::nan("") : median(finals);
  if (diverged > 0) {
    report.checks.push_back(check_le("series_completed", "overflowed series", static_cast<double>(diverged), 0.0,
                                     "every simulated series must stay finite"));
  }
  if (c.checks.max_g1_eigenvalue) {
    report.checks.push_back(check_le("g1_negative_semidefinite", "max eigenvalue of G1 matrix", max_g1,
                                     *c.checks.max_g1_eigenvalue,
                                     "Delta gamma^-1 - 2 beta + beta gamma beta along the run"));
  }
  if (ls.construction == "rls") {
    report.summary["max_rls_discrepancy"] = rls_gap;
    report.summary["max_statistic_discrepancy"] = stat_gap;
    if (c.checks.max_rls_discrepancy) {
      report.checks.push_back(check_le("rls_equivalence", "max |Z_t - theta_hat_t|", rls_gap,
                                       *c.checks.max_rls_discrepancy,
                                       "linear procedure with gamma_t = I_t^-1 reproduces RLS"));
      report.checks.push_back(check_le("fisher_statistic_equivalence", "max relative statistic gap", stat_gap,
                                       *c.checks.max_rls_discrepancy,
                                       "tracked statistic matches the RLS Fisher quadratic form"));
    }
  } else {
    report.summary["statistic_spread"] = spread;
  }
  return report;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  switch (config.kind) {
    case ScenarioKind::kPolynomial: return run_polynomial(config);
    case ScenarioKind::kRateLink:
    case ScenarioKind::kHarmonicRate: return run_rate_link(config);
    case ScenarioKind::kArRls:
    case ScenarioKind::kArRml:
    case ScenarioKind::kArRobust: return run_ar(config);
    case ScenarioKind::kLinear: return run_linear(config);
  }
  throw ConfigError("unknown scenario");
}

}  // namespace tsa
