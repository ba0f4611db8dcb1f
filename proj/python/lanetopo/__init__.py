# Copyright 2026 The lanetopo Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Lane topology reasoning toolkit: metrics, topology heads and synthetic data."""

from lanetopo._core import (
    ConfigError,
    FormatError,
    InputError,
    TrainingError,
    ValidationError,
    average_precision,
    bezier_point,
    box_iou,
    category_histogram,
    corrupt_scenes,
    evaluate,
    evaluate_files,
    focal_loss,
    frechet_distance,
    generate_scenes,
    hungarian_solve,
    init_params,
    ols,
    predict,
    resample_plan,
    sample_lane,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "FormatError",
    "InputError",
    "TrainingError",
    "ValidationError",
    "average_precision",
    "bezier_point",
    "box_iou",
    "category_histogram",
    "corrupt_scenes",
    "evaluate",
    "evaluate_files",
    "focal_loss",
    "frechet_distance",
    "generate_scenes",
    "hungarian_solve",
    "init_params",
    "ols",
    "predict",
    "resample_plan",
    "sample_lane",
    "train",
]
