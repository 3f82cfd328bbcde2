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

#include <vector>

#include <gtest/gtest.h>

#include "mvov3d/errors.h"
#include "mvov3d/merge.h"
#include "mvov3d/refine2d.h"
#include "mvov3d/synthetic.h"

namespace mvov3d {
namespace {

io::Scene NoisyScene(std::uint64_t seed, double sigma = 0.5) {
  synthetic::SyntheticSpec spec;
  spec.noise_sigma = sigma;
  spec.points_per_plane = 150;
  spec.views = 4;
  return synthetic::GenerateSyntheticScene(seed, spec);
}

TEST(PipelineTest, EqualsManualComposition) {
  const io::Scene scene = NoisyScene(1);
  PipelineConfig config;
  config.superpoints.enabled = false;
  const auto result = RunPipeline(scene, config);

  std::vector<DenseFeatureMap> maps;
  for (const auto& view : scene.views) {
    const refine2d::MapShape shape{view.features.height(), view.features.width(),
                                   view.features.dim()};
    const auto region = refine2d::ComposeRegionMaps(shape, view.regions);
    const auto selections =
        refine1d::SelectViewTexts(view.regions, view.proposals, config.delta);
    const auto text = refine1d::ComposeTextMaps(shape, view.regions, selections);
    maps.push_back(merge::MergePixelFeatures(view.features, region, text));
  }
  const auto fused = fusion::FuseMultiview(scene.cloud, scene.views, maps, {}, 0.05);
  EXPECT_EQ(result.fused.data(), fused.data());
  EXPECT_EQ(result.fused.counts(), fused.counts());
  EXPECT_EQ(result.predictions, eval::AssignLabels(fused, *scene.labels));
  ASSERT_TRUE(result.report.has_value());
  EXPECT_FALSE(result.partition.has_value());
}

TEST(PipelineTest, DisablingRefinementFusesBaseFeatures) {
  const io::Scene scene = NoisyScene(2);
  PipelineConfig config;
  config.use_region = false;
  config.use_text = false;
  config.superpoints.enabled = false;
  const auto result = RunPipeline(scene, config);
  std::vector<DenseFeatureMap> maps;
  for (const auto& view : scene.views) maps.push_back(view.features);
  const auto fused = fusion::FuseMultiview(scene.cloud, scene.views, maps, {}, 0.05);
  EXPECT_EQ(result.fused.data(), fused.data());
  EXPECT_EQ(result.accepted_texts, 0u);
  EXPECT_EQ(RefineView(scene.views[0], config).improved.data(),
            scene.views[0].features.data());
}

TEST(PipelineTest, ZeroNoiseLabelsEveryVisiblePointCorrectly) {
  const io::Scene scene = NoisyScene(3, 0.0);
  const auto result = RunPipeline(scene, PipelineConfig{});
  std::size_t visible = 0;
  for (std::size_t i = 0; i < scene.cloud.size(); ++i) {
    if (!result.fused.valid(i)) continue;
    ++visible;
    EXPECT_EQ(result.predictions[i], scene.cloud.labels[i]) << "point " << i;
  }
  EXPECT_GT(visible, scene.cloud.size() / 2);
}

TEST(PipelineTest, ThreadCountDoesNotChangeResult) {
  const io::Scene scene = NoisyScene(4);
  PipelineConfig config;
  const auto one = RunPipeline(scene, config);
  config.threads = 4;
  const auto many = RunPipeline(scene, config);
  EXPECT_EQ(one.predictions, many.predictions);
  EXPECT_EQ(one.partition->labels, many.partition->labels);
  for (std::size_t j = 0; j < one.features.data().size(); ++j) {
    EXPECT_NEAR(one.features.data()[j], many.features.data()[j], 1e-5);
  }
}

TEST(PipelineTest, StageFailuresAreTagged) {
  io::Scene scene = NoisyScene(5);
  PipelineConfig config;
  config.occlusion.threshold = 2.0;
  try {
    RunPipeline(scene, config);
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "config");
  }
  scene.labels.reset();
  try {
    RunPipeline(scene, PipelineConfig{});
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "query");
  }
}

TEST(PipelineTest, SuperpointStageFailureIsTagged) {
  synthetic::SyntheticSpec spec;
  spec.planes = 1;
  spec.points_per_plane = 10;
  spec.views = 2;
  const io::Scene scene = synthetic::GenerateSyntheticScene(6, spec);
  try {
    RunPipeline(scene, PipelineConfig{});
    FAIL() << "expected PipelineError";
  } catch (const PipelineError& e) {
    EXPECT_EQ(e.stage(), "superpoint");
  }
}

}  // namespace
}  // namespace mvov3d
