/* Copyright 2026 The mvov3d Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef MVOV3D_PIPELINE_H_
#define MVOV3D_PIPELINE_H_

#include <optional>
#include <vector>

#include "mvov3d/feature_map.h"
#include "mvov3d/fusion.h"
#include "mvov3d/query_eval.h"
#include "mvov3d/refine1d.h"
#include "mvov3d/scene_io.h"
#include "mvov3d/superpoint.h"

namespace mvov3d {

struct PipelineConfig {
  double delta = refine1d::kDeltaScanNet200;
  bool use_region = true;
  bool use_text = true;
  double depth_tolerance = geometry::kDefaultDepthTolerance;
  fusion::OcclusionPolicy occlusion;
  superpoint::SuperpointConfig superpoints;
  unsigned threads = 1;

  // Throws ConfigError on out-of-range values.
  void Validate() const;
};

struct ViewRefinement {
  DenseFeatureMap improved;
  std::size_t accepted_texts = 0;
};

// Region flooding, text selection and flooding, then the indicator-weighted
// merge for a single view. Disabled sources contribute nothing.
ViewRefinement RefineView(const ViewBundle& view, const PipelineConfig& config);

struct PipelineResult {
  PointFeatureField fused;     // multi-view average before pooling
  PointFeatureField features;  // final per-point features
  std::optional<superpoint::SuperpointPartition> partition;
  std::vector<std::int32_t> predictions;
  // Present when the cloud carries ground-truth labels.
  std::optional<eval::EvalReport> report;
  std::size_t accepted_texts = 0;
};

// Full chain: per-view refinement, multi-view fusion, superpoint pooling,
// label assignment and, with ground truth, evaluation. The scene must carry
// a label set. Stage failures are rethrown as PipelineError tagged with
// the stage name.
PipelineResult RunPipeline(const io::Scene& scene, const PipelineConfig& config);

}  // namespace mvov3d

#endif  // MVOV3D_PIPELINE_H_
