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

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tsa/diagnostics.hpp"
#include "tsa/engine.hpp"
#include "tsa/estimators.hpp"
#include "tsa/scenarios.hpp"
#include "tsa/truncation.hpp"

namespace py = pybind11;

namespace {

using nlohmann::json;

tsa::ScenarioConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw tsa::ConfigError(std::string("cannot parse configuration: ") + e.what());
  }
  return tsa::ScenarioConfig::from_json(j);
}

py::dict trajectory_dict(const tsa::Trajectory& tr) {
  py::dict d;
  const auto n = static_cast<Eigen::Index>(tr.size());
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> states(
      tr.states.data(), tr.states.empty() ? 0 : n, tr.dim);
  d["t"] = tr.steps;
  d["states"] = tsa::Matrix(states);
  d["norm2"] = tr.norm2;
  d["projected"] = std::vector<bool>(tr.projected.begin(), tr.projected.end());
  d["status"] = tsa::to_string(tr.status);
  d["status_step"] = tr.status_step;
  d["draws"] = tr.draws;
  d["final_state"] = tr.final_state;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Truncated stochastic approximation core";

  py::register_exception<tsa::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<tsa::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<tsa::Region>(m, "Region")
      .def_static("whole_space", &tsa::Region::whole_space)
      .def_static("box", &tsa::Region::box, py::arg("lower"), py::arg("upper"))
      .def_static("interval", &tsa::Region::interval, py::arg("lower"), py::arg("upper"))
      .def_static("sphere", &tsa::Region::sphere, py::arg("center"), py::arg("radius"))
      .def_property_readonly("kind", &tsa::Region::kind)
      .def("contains", &tsa::Region::contains, py::arg("z"), py::arg("tol") = 0.0)
      .def("project", &tsa::Region::project, py::arg("z"));

  m.def("project", &tsa::project, py::arg("region"), py::arg("z"));
  m.def("cnorm_condition", &tsa::cnorm_condition, py::arg("c"), py::arg("center"), py::arg("radius"),
        py::arg("root"));

  py::class_<tsa::EstimatorState>(m, "EstimatorState")
      .def(py::init([](const tsa::Vector& theta, const tsa::Matrix& inv_info) {
             return tsa::EstimatorState::initial(theta, inv_info);
           }),
           py::arg("theta"), py::arg("inv_info"))
      .def_readonly("theta", &tsa::EstimatorState::theta)
      .def_readonly("inv_info", &tsa::EstimatorState::inv_info)
      .def_readonly("t", &tsa::EstimatorState::t);

  m.def("rls_step", &tsa::rls_step, py::arg("state"), py::arg("x_window"), py::arg("x_new"));
  m.def("rml_step", &tsa::rml_step, py::arg("state"), py::arg("x_window"), py::arg("x_new"), py::arg("score"),
        py::arg("fisher"));
  m.def("sherman_morrison", &tsa::sherman_morrison, py::arg("inv"), py::arg("x"), py::arg("weight") = 1.0);
  m.def("g1_matrix", &tsa::g1_matrix, py::arg("gamma_prev"), py::arg("gamma_curr"), py::arg("beta"));
  m.def("student_fisher", &tsa::student_fisher, py::arg("dof"), py::arg("scale"));
  m.def("adt_partial_sum", &tsa::adt_partial_sum, py::arg("a"), py::arg("n"));

  m.def(
      "simulate_ar",
      [](const tsa::Vector& theta, double sigma, tsa::StepIndex horizon, std::uint64_t seed) {
        const tsa::ARSeries s =
            tsa::simulate_ar({theta, tsa::Innovation::gaussian(sigma), tsa::Vector()}, horizon, seed);
        return s.values;
      },
      py::arg("theta"), py::arg("sigma"), py::arg("horizon"), py::arg("seed"));

  m.def(
      "run_trajectory",
      [](const std::string& config, std::uint64_t seed, tsa::StepIndex stride) {
        const auto c = parse_config(config);
        py::gil_scoped_release release;
        tsa::Trajectory tr = tsa::run(tsa::make_problem(c), c.horizon, seed, {1, stride, true});
        py::gil_scoped_acquire acquire;
        return trajectory_dict(tr);
      },
      py::arg("config"), py::arg("seed"), py::arg("stride") = 1,
      "Single trajectory of the problem described by a JSON configuration.");

  m.def(
      "run_scenario",
      [](const std::string& config) {
        const auto c = parse_config(config);
        std::string out;
        {
          py::gil_scoped_release release;
          out = tsa::run_scenario(c).to_json().dump();
        }
        return out;
      },
      py::arg("config"), "Runs a scenario and returns its report as a JSON string.");

  m.def(
      "check_conditions",
      [](const std::string& config, const std::vector<std::string>& names) {
        const auto c = parse_config(config);
        std::vector<tsa::DriftCondition> conds;
        for (const auto& n : names) conds.push_back(tsa::parse_drift_condition(n));
        json out = json::array();
        for (const auto& r : tsa::run_condition_checks(c, conds)) out.push_back(tsa::to_json(r));
        return out.dump();
      },
      py::arg("config"), py::arg("conditions"));

  m.def("scenario_names", &tsa::scenario_names);
}
