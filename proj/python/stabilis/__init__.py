# Copyright 2026 The Stabilis Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python interface to the stabilis stability-analysis library.

Geometry crosses the boundary as NumPy arrays; reports come back as plain
dictionaries decoded from the library's JSON output.
"""

import json as _json

from ._core import (
    GroundFrame,
    LossConfig,
    Mesh,
    PartSegmentation,
    StabilisError,
    SurfaceRegressor,
    ToyBody,
    bose_lp,
    combined_energy,
    ground_loss,
    is_watertight,
    part_volumes,
    pressure,
    pull_loss,
    push_loss,
    read_mesh,
    run_cli,
    sample_surface,
    signed_volume,
    stability_loss,
    write_mesh,
)
from . import _core

__all__ = [
    "GroundFrame",
    "LossConfig",
    "Mesh",
    "PartSegmentation",
    "StabilisError",
    "SurfaceRegressor",
    "ToyBody",
    "analyze",
    "bose_lp",
    "combined_energy",
    "fit",
    "ground_loss",
    "is_watertight",
    "part_volumes",
    "pressure",
    "pull_loss",
    "push_loss",
    "read_mesh",
    "run_cli",
    "sample_surface",
    "signed_volume",
    "stability_loss",
    "write_mesh",
]


def analyze(mesh, seg, reg, ground=None, cfg=None, tau=0.10):
    """Stability report for one posed mesh, as a dict."""
    ground = GroundFrame() if ground is None else ground
    cfg = LossConfig.regression() if cfg is None else cfg
    return _json.loads(_core.analyze_json(mesh, seg, reg, ground, cfg, tau))


def fit(problem_path):
    """Run a fit problem file and return the result summary as a dict."""
    return _json.loads(_core.fit_json(str(problem_path)))
