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

// trunc-sa: run scenarios and check conditions from JSON configurations.
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "tsa/io.hpp"
#include "tsa/scenarios.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void print_checks(const tsa::ScenarioReport& report) {
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.statistic << " = " << c.value << ' '
              << c.comparison << ' ' << c.threshold;
    if (c.comparison == "within") std::cout << " +/- " << c.tolerance;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated stochastic approximation experiments"};
  app.require_subcommand(1);

  std::string scenario, config_path, out_dir = "out", conditions;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<long long> horizon;
  std::optional<unsigned> workers;

  auto* run = app.add_subcommand("run", "Run a scenario and write trajectories.csv, report.json and rates.csv");
  run->add_option("scenario", scenario, "Scenario name (see `list`)")->required();
  run->add_option("--config", config_path, "JSON configuration file")->required();
  run->add_option("--seed", seed, "Base seed");
  run->add_option("--reps", reps, "Number of replications");
  run->add_option("--horizon", horizon, "Number of steps T");
  run->add_option("--workers", workers, "Worker threads (0 = hardware concurrency)");
  run->add_option("--out", out_dir, "Output directory");

  auto* check = app.add_subcommand("check", "Evaluate drift conditions on the probe grid");
  check->add_option("conditions", conditions, "Comma-separated list, e.g. D1,H1,W1,B1,Y1")->required();
  check->add_option("--config", config_path, "JSON configuration file")->required();
  check->add_option("--out", out_dir, "Directory for conditions.csv");

  app.add_subcommand("list", "List scenarios and conditions");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (app.got_subcommand("list")) {
      std::cout << "scenarios:";
      for (const auto& s : tsa::scenario_names()) std::cout << ' ' << s;
      std::cout << "\nconditions: D1 H1 H4 W1 B1 Y1\n";
      return kPass;
    }

    if (app.got_subcommand("run")) {
      const auto kind = tsa::parse_scenario_kind(scenario);
      std::ifstream in(config_path);
      if (!in) throw tsa::ConfigError("cannot open configuration file '" + config_path + "'");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in, nullptr, true, true);
      } catch (const nlohmann::json::parse_error& e) {
        throw tsa::ConfigError(std::string("cannot parse configuration: ") + e.what());
      }
      if (seed) j["seed"] = *seed;
      if (reps) j["replications"] = *reps;
      if (horizon) j["horizon"] = *horizon;
      if (workers) j["workers"] = *workers;
      const auto config = tsa::ScenarioConfig::from_json(j, kind);
      const auto report = tsa::run_scenario(config);
      tsa::write_scenario_outputs(report, out_dir);
      print_checks(report);
      std::cout << (report.passed() ? "all checks passed" : "some checks failed") << " (" << out_dir << ")\n";
      return report.passed() ? kPass : kCheckFailed;
    }

    // check
    auto config = tsa::ScenarioConfig::load(config_path);
    std::vector<tsa::DriftCondition> conds;
    for (const auto& name : split(conditions)) conds.push_back(tsa::parse_drift_condition(name));
    if (conds.empty()) throw tsa::ConfigError("no conditions given");
    const auto reports = tsa::run_condition_checks(config, conds);
    std::filesystem::create_directories(out_dir);
    std::ofstream csv(std::filesystem::path(out_dir) / "conditions.csv");
    tsa::write_conditions_csv(csv, reports);
    bool ok = true;
    for (const auto& r : reports) {
      const std::string name = r.rows.empty() ? "?" : tsa::to_string(r.rows.front().condition);
      std::cout << (r.passed() ? "PASS " : "FAIL ") << name << ": " << r.violations << " violations ("
                << r.early_violations << " before t_min, " << r.skipped << " skipped, " << r.rows.size()
                << " evaluated)\n";
      ok = ok && r.passed();
    }
    return ok ? kPass : kCheckFailed;
  } catch (const tsa::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const tsa::DomainError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  }
}
