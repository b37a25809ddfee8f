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

#include "tsa/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>

namespace tsa {

namespace {

void put(std::ostream& out, double v) {
  if (std::isnan(v)) {
    out << "nan";
  } else if (v == std::floor(v) && std::abs(v) < 1e15) {
    out << static_cast<long long>(v);
  } else {
    out << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  }
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& tr) {
  out << "t";
  for (Eigen::Index i = 0; i < tr.dim; ++i) out << ",z_" << i + 1;
  out << ",norm2,projected\n";
  for (std::size_t k = 0; k < tr.size(); ++k) {
    out << tr.steps[k];
    for (Eigen::Index i = 0; i < tr.dim; ++i) {
      out << ',';
      put(out, tr.states.empty() ? std::nan("") : tr.states[k * tr.dim + i]);
    }
    out << ',';
    put(out, tr.norm2[k]);
    out << ',' << (tr.projected[k] ? 1 : 0) << '\n';
  }
}

nlohmann::json trajectory_summary(const Trajectory& tr) {
  nlohmann::json j;
  j["status"] = to_string(tr.status);
  j["status_step"] = tr.status_step;
  j["completed_steps"] = tr.completed_steps;
  j["noise_draws"] = tr.draws;
  j["message"] = tr.message;
  j["final_state"] = std::vector<double>(tr.final_state.data(), tr.final_state.data() + tr.final_state.size());
  std::size_t projected = 0;
  for (auto p : tr.projected) projected += p ? 1 : 0;
  j["recorded_projections"] = projected;
  return j;
}

void write_conditions_csv(std::ostream& out, const std::vector<DriftReport>& reports) {
  out << "condition,t,grid_point,value,threshold,ok\n";
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      out << to_string(row.condition) << ',' << row.t << ",\"";
      for (Eigen::Index i = 0; i < row.grid_point.size(); ++i) {
        if (i > 0) out << ';';
        put(out, row.grid_point[i]);
      }
      out << "\",";
      put(out, row.value);
      out << ',';
      put(out, row.threshold);
      out << ',' << (row.ok ? "true" : "false") << '\n';
    }
  }
}

void write_table_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i > 0) out << ',';
    out << table.header[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      put(out, row[i]);
    }
    out << '\n';
  }
}

void write_scenario_outputs(const ScenarioReport& report, const std::string& dir) {
  const std::filesystem::path root(dir);
  std::filesystem::create_directories(root);
  {
    auto out = open_for_write(root / "trajectories.csv");
    write_table_csv(out, report.trajectory);
  }
  {
    auto out = open_for_write(root / "rates.csv");
    write_table_csv(out, report.rate_rows);
  }
  {
    auto out = open_for_write(root / "report.json");
    out << report.to_json().dump(2) << '\n';
  }
  if (!report.conditions.empty()) {
    auto out = open_for_write(root / "conditions.csv");
    write_conditions_csv(out, report.conditions);
  }
}

}  // namespace tsa
