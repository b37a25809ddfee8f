# Copyright 2026 The trunc-sa Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Truncated stochastic approximation: projections, recursions and scenarios."""

import json as _json

from ._core import (
    ConfigError,
    DomainError,
    EstimatorState,
    Region,
    adt_partial_sum,
    cnorm_condition,
    g1_matrix,
    project,
    rls_step,
    rml_step,
    scenario_names,
    sherman_morrison,
    simulate_ar,
    student_fisher,
)
from . import _core

__all__ = [
    "ConfigError",
    "DomainError",
    "EstimatorState",
    "Region",
    "adt_partial_sum",
    "check_conditions",
    "cnorm_condition",
    "g1_matrix",
    "project",
    "rls_step",
    "rml_step",
    "run_scenario",
    "run_trajectory",
    "scenario_names",
    "sherman_morrison",
    "simulate_ar",
    "student_fisher",
]


def _dump(config):
    return config if isinstance(config, str) else _json.dumps(config)


def run_scenario(config):
    """Runs a scenario from a config dict (or JSON text); returns the report dict."""
    return _json.loads(_core.run_scenario(_dump(config)))


def run_trajectory(config, seed, stride=1):
    """One trajectory of the configured problem as a dict of arrays."""
    return _core.run_trajectory(_dump(config), seed, stride)


def check_conditions(config, conditions):
    """Drift-condition summaries for the configured field and truncation."""
    return _json.loads(_core.check_conditions(_dump(config), list(conditions)))
