# Copyright 2026 The mvov3d Authors. All Rights Reserved.
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
# ==============================================================================

"""Smoke tests for the Python bindings, checked against numpy oracles."""

import json
import os
import subprocess

import numpy as np
import pytest

import mvov3d
from mvov3d import interchange


def test_tensor_round_trip_matches_pure_python(tmp_path):
  rng = np.random.default_rng(0)
  arrays = [
      rng.standard_normal((3, 5, 2)).astype(np.float32),
      rng.integers(0, 255, (7, 4), dtype=np.uint8),
      rng.integers(-100, 100, (11,), dtype=np.int32),
  ]
  for i, a in enumerate(arrays):
    native = tmp_path / f"n{i}.mvov"
    pure = tmp_path / f"p{i}.mvov"
    mvov3d.write_tensor(native, a)
    interchange.save(pure, a)
    assert native.read_bytes() == pure.read_bytes()
    np.testing.assert_array_equal(mvov3d.read_tensor(pure), a)
    np.testing.assert_array_equal(interchange.load(native), a)


def test_corrupt_header_is_rejected(tmp_path):
  path = tmp_path / "t.mvov"
  mvov3d.write_tensor(path, np.zeros(4, np.float32))
  data = bytearray(path.read_bytes())
  data[0:4] = b"XXXX"
  path.write_bytes(bytes(data))
  with pytest.raises(mvov3d.LoadError, match="magic"):
    mvov3d.read_tensor(path)
  with pytest.raises(ValueError, match="magic"):
    interchange.load(path)


def test_compose_region_maps_matches_loop():
  rng = np.random.default_rng(1)
  masks = (rng.random((4, 6, 5)) < 0.5).astype(np.uint8)
  emb = rng.standard_normal((4, 3)).astype(np.float32)
  values, counts = mvov3d.compose_region_maps(masks, emb)
  np.testing.assert_array_equal(counts, masks.sum(axis=0))
  for r in range(6):
    for c in range(5):
      hit = masks[:, r, c] == 1
      if hit.any():
        want = emb[hit].astype(np.float64).mean(axis=0)
        np.testing.assert_allclose(values[r, c], want, atol=1e-6)


def test_select_text_threshold():
  region = np.array([1.0, 0.0, 0.0], np.float32)
  proposals = np.array([[0.0, 1.0, 0.0], [0.8, 0.6, 0.0]], np.float32)
  index, score = mvov3d.select_text(region, proposals, 0.24)
  assert index == 1
  assert score == pytest.approx(0.8, abs=1e-6)
  assert mvov3d.select_text(region, proposals, 0.8 + 1e-6) is None
  assert mvov3d.select_text(region, proposals, -1.1) is not None


def test_merge_averages_base_with_defined_refinements():
  rng = np.random.default_rng(2)
  base = rng.standard_normal((3, 4, 2)).astype(np.float32)
  region = rng.standard_normal((3, 4, 2)).astype(np.float32)
  text = rng.standard_normal((3, 4, 2)).astype(np.float32)
  rc = rng.integers(0, 2, (3, 4)).astype(np.uint32)
  tc = rng.integers(0, 2, (3, 4)).astype(np.uint32)
  merged = mvov3d.merge_pixel_features(base, region, rc, text, tc)
  n = 1.0 + (rc > 0) + (tc > 0)
  total = base + region * (rc > 0)[..., None] + text * (tc > 0)[..., None]
  want = total / n[..., None]
  np.testing.assert_allclose(merged, want, atol=1e-6)


def test_superpoints_split_two_planes():
  g = np.linspace(-1.0, 1.0, 10)
  a = np.array([[x, y, 0.0] for x in g for y in g])
  b = np.array([[x, 0.0, z] for x in g for z in g[1:] + 0.02])
  pos = np.vstack([a, b]).astype(np.float32)
  normals = np.vstack([np.tile([0, 0, 1], (len(a), 1)),
                       np.tile([0, 1, 0], (len(b), 1))]).astype(np.float32)
  labels = mvov3d.compute_superpoints(pos, normals, knn=8, k_param=0.1,
                                      min_size=10)
  assert len(np.unique(labels)) == 2
  assert len(np.unique(labels[: len(a)])) == 1


def test_pooling_is_superpoint_mean_and_idempotent():
  rng = np.random.default_rng(3)
  feats = rng.standard_normal((30, 4)).astype(np.float32)
  counts = rng.integers(0, 3, 30).astype(np.uint32)
  labels = rng.integers(0, 5, 30).astype(np.int32)
  pooled, pcounts = mvov3d.pool_superpoints(feats, counts, labels)
  for s in range(5):
    members = (labels == s) & (counts > 0)
    if members.any():
      want = feats[members].astype(np.float64).mean(axis=0)
      np.testing.assert_allclose(pooled[labels == s],
                                 np.tile(want, ((labels == s).sum(), 1)),
                                 atol=1e-6)
  again, _ = mvov3d.pool_superpoints(pooled, pcounts, labels)
  np.testing.assert_array_equal(again, pooled)


def test_evaluate_hand_case():
  gt = np.array([0, 0, 0, 0, 1, 1, 1, 1, 2, 2], np.int32)
  pred = np.array([0, 0, 1, 2, 1, 1, 0, 0, 2, -1], np.int32)
  report = mvov3d.evaluate(pred, gt, 3, buckets={0: "head", 1: "common",
                                                 2: "tail"})
  assert report["miou"] == pytest.approx(16 / 45, abs=1e-9)
  assert report["macc"] == pytest.approx(0.5, abs=1e-9)
  assert set(report["buckets"]) == {"head", "common", "tail"}


def test_assign_labels_matches_argmax():
  rng = np.random.default_rng(4)
  feats = rng.standard_normal((50, 6)).astype(np.float32)
  counts = np.ones(50, np.uint32)
  counts[:5] = 0
  emb = rng.standard_normal((4, 6)).astype(np.float32)
  emb /= np.linalg.norm(emb, axis=1, keepdims=True)
  got = mvov3d.assign_labels(feats, counts, emb)
  cos = (feats / np.linalg.norm(feats, axis=1, keepdims=True)) @ emb.T
  np.testing.assert_array_equal(got[5:], cos[5:].argmax(axis=1))
  assert (got[:5] == -1).all()


def test_pipeline_on_synthetic_scene(tmp_path):
  manifest = mvov3d.generate_synthetic(5, tmp_path / "scene",
                                       points_per_plane=150, views=4)
  scene = mvov3d.load_scene(manifest)
  assert scene.num_points == 600
  config = mvov3d.PipelineConfig()
  config.threads = 2
  result = mvov3d.run_pipeline(scene, config)
  visible = result["fused_counts"] > 0
  np.testing.assert_array_equal(result["predictions"][visible],
                                scene.labels[visible])
  config.superpoints = False
  config.use_region = False
  config.use_text = False
  base = mvov3d.run_pipeline(scene, config)
  assert base["superpoints"] is None
  assert base["accepted_texts"] == 0


def test_pipeline_config_errors():
  config = mvov3d.PipelineConfig()
  with pytest.raises(mvov3d.ConfigError):
    config.occlusion_mode = "sometimes"
  config.occlusion_threshold = 3.0
  with pytest.raises(mvov3d.ConfigError):
    config.validate()


@pytest.mark.skipif(not os.environ.get("MVOV3D_CLI"), reason="no CLI binary")
def test_cli_validates_python_written_scene(tmp_path):
  manifest = mvov3d.generate_synthetic(2, tmp_path / "scene", views=2)
  out = subprocess.run([os.environ["MVOV3D_CLI"], "validate", str(manifest)],
                       capture_output=True, text=True, check=True)
  assert json.loads(out.stdout)["views"] == 2
