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

#include <iosfwd>
#include <string>

#include "tsa/diagnostics.hpp"
#include "tsa/engine.hpp"
#include "tsa/scenarios.hpp"

namespace tsa {

// t,z_1..z_m,norm2,projected
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
nlohmann::json trajectory_summary(const Trajectory& trajectory);

// condition,t,grid_point,value,threshold,ok
void write_conditions_csv(std::ostream& out, const std::vector<DriftReport>& reports);

void write_table_csv(std::ostream& out, const Table& table);

// Writes trajectories.csv, report.json and rates.csv into dir.
void write_scenario_outputs(const ScenarioReport& report, const std::string& dir);

}  // namespace tsa
