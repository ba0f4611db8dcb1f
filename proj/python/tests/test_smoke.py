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
"""Smoke tests for the Python module."""

import itertools
import json
import math
import os
import subprocess
import tempfile

import pytest

import lanetopo


def test_ols_table_rows():
    assert round(lanetopo.ols(0.36, 0.80, 0.23, 0.33), 2) == 0.55
    assert lanetopo.ols(1, 1, 1, 1) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        lanetopo.ols(1.2, 0.0, 0.0, 0.0)


def test_average_precision_by_hand():
    assert lanetopo.average_precision([True, False, True], 2) == pytest.approx(5.0 / 6.0)
    assert lanetopo.average_precision([], 0) == 1.0
    assert lanetopo.average_precision([False], 0) == 0.0


def test_bezier_endpoints_and_frechet():
    ctrl = [(0.0, 0.0, 0.0), (1.0, 2.0, 0.0), (3.0, 2.0, 0.0), (4.0, 0.0, 0.0)]
    assert lanetopo.bezier_point(ctrl, 0.0) == pytest.approx(ctrl[0])
    assert lanetopo.bezier_point(ctrl, 1.0) == pytest.approx(ctrl[-1])
    pts = lanetopo.sample_lane(ctrl)
    assert len(pts) == 11
    shifted = [(x, y + 1.5, z) for x, y, z in pts]
    assert lanetopo.frechet_distance(pts, shifted) == pytest.approx(1.5)


def test_hungarian_matches_permutation_search():
    cost = [[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]]
    pairs, total = lanetopo.hungarian_solve(cost)
    best = min(sum(cost[i][p[i]] for i in range(3)) for p in itertools.permutations(range(3)))
    assert total == pytest.approx(best)
    assert sorted(r for r, _ in pairs) == [0, 1, 2]


def test_box_iou_and_focal():
    assert lanetopo.box_iou((0, 0, 2, 2), (1, 0, 3, 2)) == pytest.approx(1.0 / 3.0)
    p = 0.3
    expected = -0.25 * (1 - p) ** 2 * math.log(p)
    assert lanetopo.focal_loss(p, 1) == pytest.approx(expected)


def test_pipeline_identity_channel():
    scenes = lanetopo.generate_scenes(12, 7)
    lines = scenes.strip().split("\n")
    assert len(lines) == 12
    assert json.loads(lines[0])["scene_id"] == "scene_000000"
    dets = lanetopo.corrupt_scenes(scenes, 7)
    train_s, val_s = "\n".join(lines[:10]), "\n".join(lines[10:])
    det_lines = dets.strip().split("\n")
    train_d, val_d = "\n".join(det_lines[:10]), "\n".join(det_lines[10:])
    params, losses = lanetopo.train(train_s, train_d, val_s, val_d, epochs=2, feature_width=16, seed=3)
    assert len(losses) == 2 and all(math.isfinite(v) for v in losses)
    preds = lanetopo.predict(params, val_d)
    report = lanetopo.evaluate(preds, val_s)
    assert report["det_l"] == 1.0 and report["det_t"] == 1.0
    assert 0.0 <= report["ols"] <= 1.0
    assert report["scene_count"] == 2


def test_scene_mismatch_raises_input_error():
    scenes = lanetopo.generate_scenes(2, 1)
    preds = lanetopo.predict(lanetopo.init_params(8, 0), lanetopo.corrupt_scenes(scenes, 1))
    other = lanetopo.generate_scenes(3, 1)
    with pytest.raises(lanetopo.InputError):
        lanetopo.evaluate(preds, other)


def test_resample_plan_bounds():
    scenes = lanetopo.generate_scenes(30, 5)
    plan = lanetopo.resample_plan(scenes)
    assert plan == sorted(plan)
    factors = [plan.count(i) for i in range(30)]
    assert all(f == 1 or 5 <= f <= 20 for f in factors)
    assert sum(lanetopo.category_histogram(scenes)) > 0


def test_malformed_json_raises_format_error():
    with pytest.raises(lanetopo.FormatError):
        lanetopo.evaluate("{not json", "")


@pytest.mark.skipif("LANETOPO_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_generate_is_deterministic():
    cli = os.environ["LANETOPO_CLI"]
    with tempfile.TemporaryDirectory() as tmp:
        outs = []
        for name in ("a", "b"):
            out = os.path.join(tmp, name)
            subprocess.run([cli, "--seed", "7", "--out", out, "generate", "--scenes", "10"], check=True,
                           capture_output=True)
            with open(os.path.join(out, "train.scenes.jsonl"), "rb") as f:
                outs.append(f.read())
        assert outs[0] == outs[1]
