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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "tsa/io.hpp"
#include "tsa/scenarios.hpp"

namespace tsa {
namespace {

using nlohmann::json;

json small_rate_link() {
  return json{{"scenario", "rate-link"},
              {"horizon", 2000},
              {"replications", 8},
              {"seed", 5},
              {"root", 1.0},
              {"step", {{"family", "power"}, {"exponent", 0.75}}},
              {"rates", {{"deltas", {0.6}}}},
              {"checks", {{"max_median_ratio", 10.0}}}};
}

TEST(Config, DefaultsAndForcedKind) {
  const ScenarioConfig c = ScenarioConfig::from_json(json{{"horizon", 50}}, ScenarioKind::kHarmonicRate);
  EXPECT_EQ(c.kind, ScenarioKind::kHarmonicRate);
  EXPECT_EQ(c.replications, 100u);
  ASSERT_TRUE(c.checks.target_tail_slope.has_value());
  EXPECT_EQ(*c.checks.target_tail_slope, -1.0);
  EXPECT_DOUBLE_EQ(c.rates.tail_fraction, 0.5);
}

TEST(Config, Rejections) {
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "rate-link"}, {"horizon", 5}}), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "rate-link"}, {"replications", 0}}), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(
                   json{{"scenario", "rate-link"}, {"step", {{"family", "power"}, {"exponent", 0.5}}}}),
               ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "bogus"}}), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"horizon", 50}}), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "ar-rls"}}, ScenarioKind::kLinear), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "polynomial"},
                                              {"field", {{"family", "polynomial"}, {"coefficients", {0.2, 0, 1}}}},
                                              {"rates", {{"deltas", {0.5}}}}}),
               ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "ar-rls"}, {"ar", {{"theta", {0.5}},
                                              {"innovation", {{"family", "student"}, {"dof", 2}}}}}}),
               ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "rate-link"}, {"horizn", 100}}), ConfigError);
  EXPECT_THROW(ScenarioConfig::from_json(json{{"scenario", "harmonic-rate"}, {"horizon", "long"}}), ConfigError);
}

TEST(Config, NullDisablesCheck) {
  json j = small_rate_link();
  j["checks"]["max_median_ratio"] = nullptr;
  EXPECT_FALSE(ScenarioConfig::from_json(j).checks.max_median_ratio.has_value());
}

TEST(Config, ShippedConfigsLoad) {
  for (const auto& entry : std::filesystem::directory_iterator(TSA_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    EXPECT_NO_THROW(ScenarioConfig::load(entry.path().string()));
  }
}

TEST(ProbeGridExpand, CartesianProduct) {
  ProbeGrid g{Vector::Constant(2, -1.0), Vector::Constant(2, 1.0), 3};
  const auto pts = g.expand();
  ASSERT_EQ(pts.size(), 9u);
  EXPECT_EQ(pts.front(), Vector::Constant(2, -1.0));
  EXPECT_EQ(pts.back(), Vector::Constant(2, 1.0));
}

TEST(Scenario, ReportIsDeterministic) {
  const ScenarioConfig c = ScenarioConfig::from_json(small_rate_link());
  const json a = run_scenario(c).to_json();
  ScenarioConfig c2 = c;
  c2.workers = 3;
  const json b = run_scenario(c2).to_json();
  EXPECT_EQ(a["rates"], b["rates"]);
  EXPECT_EQ(a["checks"], b["checks"]);
}

TEST(Scenario, ReportsThresholds) {
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(small_rate_link()));
  ASSERT_FALSE(r.checks.empty());
  const json j = r.to_json();
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("threshold"));
    EXPECT_TRUE(c.contains("comparison"));
  }
  EXPECT_TRUE(j["summary"].contains("exponent_comparison") == false);
  EXPECT_NEAR(j["summary"]["delta_bound"].get<double>(), 2.0 - 4.0 / 3.0, 1e-12);
}

TEST(Scenario, PolynomialNoiselessReducesToLinearDecay) {
  json j{{"scenario", "polynomial"},
         {"horizon", 20},
         {"replications", 2},
         {"start", 0.5},
         {"field", {{"family", "polynomial"}, {"coefficients", {0.5}}}},
         {"noise", {{"family", "none"}}},
         {"truncation", {{"family", "log"}, {"C", 5.0}}},
         {"checks", {{"min_convergence_fraction", nullptr}}}};
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(j));
  double expected = 0.5;
  for (std::size_t k = 0; k < r.trajectory.rows.size(); ++k) {
    expected *= 1.0 - 0.5 / static_cast<double>(k + 1);
    EXPECT_NEAR(r.trajectory.rows[k][1], expected, 1e-15);
  }
}

TEST(Scenario, PairedStreamsShareNoise) {
  json j{{"scenario", "polynomial"},
         {"horizon", 200},
         {"replications", 10},
         {"start", 0.1},
         {"field", {{"family", "polynomial"}, {"coefficients", {1.0}}}},
         {"truncation", {{"family", "log"}, {"C", 100.0}}},
         {"untruncated_comparison", true}};
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(j));
  // The box never binds, so truncated and untruncated runs coincide.
  EXPECT_EQ(r.summary["truncated"]["converged_fraction"], r.summary["untruncated"]["converged_fraction"]);
  EXPECT_EQ(r.summary["untruncated"]["diverged_fraction"].get<double>(), 0.0);
}

TEST(Scenario, ExplosiveArWarns) {
  json j{{"scenario", "ar-rls"},
         {"horizon", 200},
         {"replications", 2},
         {"ar", {{"theta", {1.05}}, {"innovation", {{"family", "gaussian"}, {"sigma", 1.0}}}}},
         {"checks", {{"max_info_distance", 0.05}, {"max_median_ratio", nullptr}}}};
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(j));
  EXPECT_FALSE(r.warnings.empty());
  EXPECT_EQ(r.summary["stationary"], false);
  for (const auto& c : r.checks) EXPECT_NE(c.name, "info_distance");
}

TEST(Scenario, WhiteNoiseInformation) {
  json j{{"scenario", "ar-rls"},
         {"horizon", 100000},
         {"replications", 4},
         {"ar", {{"theta", {0.0}}, {"innovation", {{"family", "gaussian"}, {"sigma", 1.5}}}}},
         {"checks", {{"max_info_distance", 0.05}, {"max_median_ratio", nullptr}}}};
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(j));
  EXPECT_TRUE(r.passed());
  EXPECT_LT(r.summary["median_info_distance"].get<double>(), 0.05);
}

TEST(Scenario, LinearZeroBetaStatisticConstant) {
  json j{{"scenario", "linear"},
         {"horizon", 100},
         {"replications", 2},
         {"dimension", 2},
         {"start", {1.0, 2.0}},
         {"linear", {{"construction", "zero-beta"}}}};
  const ScenarioReport r = run_scenario(ScenarioConfig::from_json(j));
  EXPECT_EQ(r.summary["statistic_spread"].get<double>(), 0.0);
  EXPECT_TRUE(r.passed());
}

TEST(Io, TrajectoryCsvLayout) {
  SAProblem p;
  p.start = Vector::Constant(2, 1.0);
  p.field = RegressionField::linear(Vector::Zero(2), 0.5);
  p.schedule = TruncationSchedule::constant(Region::box(Vector::Constant(2, -0.2), Vector::Constant(2, 0.2)));
  const Trajectory tr = run(p, 3, 1);
  std::ostringstream out;
  write_trajectory_csv(out, tr);
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,z_1,z_2,norm2,projected");
  EXPECT_EQ(first.substr(0, 2), "1,");
  EXPECT_EQ(first.back(), '1');
}

TEST(Io, ConditionCsvLayout) {
  ScenarioConfig c = ScenarioConfig::from_json(json{{"scenario", "rate-link"}, {"probe_grid", {{"points", 3}}},
                                                    {"condition_steps", {{"last", 2}}}});
  std::ostringstream out;
  write_conditions_csv(out, run_condition_checks(c, {DriftCondition::kD1}));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "condition,t,grid_point,value,threshold,ok");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST(Io, ScenarioOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "tsa_io_test";
  std::filesystem::remove_all(dir);
  write_scenario_outputs(run_scenario(ScenarioConfig::from_json(small_rate_link())), dir.string());
  for (const char* f : {"trajectories.csv", "report.json", "rates.csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  std::ifstream in(dir / "report.json");
  const json j = json::parse(in);
  EXPECT_EQ(j["scenario"], "rate-link");
  std::filesystem::remove_all(dir);
}

#ifdef TSA_CLI_PATH
int cli(const std::string& args) {
  const std::string cmd = std::string(TSA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const std::string cfg = TSA_CONFIG_DIR;
  const auto out = (std::filesystem::temp_directory_path() / "tsa_cli_test").string();
  EXPECT_EQ(cli("list"), 0);
  EXPECT_EQ(cli("run linear --config " + cfg + "/linear_rls.json --out " + out), 0);
  EXPECT_EQ(cli("run linear --config " + cfg + "/linear_rls.json --reps 2 --horizon 50 --seed 3 --out " + out), 0);
  EXPECT_EQ(cli("run rate-link --config " + cfg + "/linear_rls.json --out " + out), 2);
  EXPECT_EQ(cli("run linear --config /nonexistent.json --out " + out), 2);
  EXPECT_EQ(cli("run linear --config " + cfg + "/linear_rls.json --horizon 3 --out " + out), 2);
  EXPECT_EQ(cli("check D1,H1,B1 --config " + cfg + "/conditions_cubic.json --out " + out), 0);
  // Pure cubic part fails B1 near the root.
  EXPECT_EQ(cli("check B1 --config " + cfg + "/conditions_flat_cubic.json --out " + out), 1);
  EXPECT_EQ(cli("check Q9 --config " + cfg + "/conditions_cubic.json --out " + out), 2);
  EXPECT_EQ(cli("frobnicate"), 2);
  std::filesystem::remove_all(out);
}
#endif

}  // namespace
}  // namespace tsa
