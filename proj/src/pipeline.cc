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

#include "mvov3d/pipeline.h"

#include <cmath>
#include <exception>
#include <string>
#include <utility>

#include "mvov3d/errors.h"
#include "mvov3d/merge.h"
#include "mvov3d/parallel.h"
#include "mvov3d/refine2d.h"

namespace mvov3d {
namespace {

template <typename Fn>
auto Stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

}  // namespace

void PipelineConfig::Validate() const {
  if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
  if (!(depth_tolerance >= 0.0)) {
    throw ConfigError("depth tolerance must be non-negative");
  }
  occlusion.Validate();
  if (superpoints.enabled) {
    if (superpoints.knn < 3) throw ConfigError("superpoint k-NN must be >= 3");
    if (!(superpoints.k_param >= 0.0)) {
      throw ConfigError("superpoint k_param must be non-negative");
    }
  }
}

ViewRefinement RefineView(const ViewBundle& view,
                          const PipelineConfig& config) {
  const refine2d::MapShape shape{view.features.height(), view.features.width(),
                                 view.features.dim()};
  SparseFeatureMap region(shape.height, shape.width, shape.dim);
  if (config.use_region) {
    region = refine2d::ComposeRegionMaps(shape, view.regions);
  }
  SparseFeatureMap text(shape.height, shape.width, shape.dim);
  std::size_t accepted = 0;
  if (config.use_text) {
    const auto selections =
        refine1d::SelectViewTexts(view.regions, view.proposals, config.delta);
    for (const auto& s : selections) accepted += s.has_value();
    text = refine1d::ComposeTextMaps(shape, view.regions, selections);
  }
  return {merge::MergePixelFeatures(view.features, region, text), accepted};
}

PipelineResult RunPipeline(const io::Scene& scene,
                           const PipelineConfig& config) {
  Stage("config", [&] {
    config.Validate();
    return 0;
  });
  if (!scene.labels) {
    throw PipelineError("query", "scene carries no label set");
  }
  PipelineResult result;

  std::vector<DenseFeatureMap> improved(scene.views.size());
  std::vector<std::size_t> accepted(scene.views.size(), 0);
  Stage("refine", [&] {
    ParallelFor(scene.views.size(), config.threads, [&](std::size_t v) {
      ViewRefinement refined = RefineView(scene.views[v], config);
      improved[v] = std::move(refined.improved);
      accepted[v] = refined.accepted_texts;
    });
    return 0;
  });
  for (std::size_t a : accepted) result.accepted_texts += a;

  result.fused = Stage("fusion", [&] {
    return fusion::FuseMultiview(scene.cloud, scene.views, improved,
                                 config.occlusion, config.depth_tolerance,
                                 config.threads);
  });

  if (config.superpoints.enabled) {
    result.partition = Stage("superpoint", [&] {
      return superpoint::ComputeSuperpoints(scene.cloud, config.superpoints,
                                            config.threads);
    });
    result.features = Stage("superpoint", [&] {
      return superpoint::PoolSuperpoints(result.fused, *result.partition);
    });
  } else {
    result.features = result.fused;
  }

  result.predictions = Stage("query", [&] {
    return eval::AssignLabels(result.features, *scene.labels, config.threads);
  });

  if (scene.cloud.has_labels()) {
    result.report = Stage("eval", [&] {
      const auto confusion = eval::ComputeConfusion(
          result.predictions, scene.cloud.labels,
          static_cast<int>(scene.labels->size()), scene.labels->ignore_label());
      return eval::ComputeMetrics(confusion, scene.labels->buckets());
    });
  }
  return result;
}

}  // namespace mvov3d
