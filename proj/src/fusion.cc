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

#include "mvov3d/fusion.h"

#include <string>

#include "mvov3d/errors.h"
#include "mvov3d/parallel.h"

namespace mvov3d::fusion {

void OcclusionPolicy::Validate() const {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("occlusion threshold must lie in [0, 1], got " +
                      std::to_string(threshold));
  }
}

std::string ToString(OcclusionMode mode) {
  return mode == OcclusionMode::kUseAll ? "all" : "occluded-only";
}

OcclusionMode ParseOcclusionMode(const std::string& name) {
  if (name == "all") return OcclusionMode::kUseAll;
  if (name == "occluded-only") return OcclusionMode::kOccludedOnly;
  throw ConfigError("unknown occlusion mode '" + name + "'");
}

std::unordered_map<std::int32_t, std::size_t> InstanceSizes(
    const ScenePointCloud& cloud) {
  std::unordered_map<std::int32_t, std::size_t> sizes;
  for (std::int32_t id : cloud.instances) {
    if (id >= 0) ++sizes[id];
  }
  return sizes;
}

std::unordered_map<std::int32_t, double> InstanceVisibilityFractions(
    const ScenePointCloud& cloud, const geometry::PointPixelMap& hits) {
  const auto sizes = InstanceSizes(cloud);
  std::unordered_map<std::int32_t, std::size_t> visible;
  for (const auto& hit : hits) {
    const std::int32_t id = cloud.instances[hit.point];
    if (id >= 0) ++visible[id];
  }
  std::unordered_map<std::int32_t, double> fractions;
  for (const auto& [id, size] : sizes) {
    const auto it = visible.find(id);
    const std::size_t seen = it == visible.end() ? 0 : it->second;
    fractions[id] = static_cast<double>(seen) / static_cast<double>(size);
  }
  return fractions;
}

double InstanceVisibilityFraction(const ScenePointCloud& cloud,
                                  const ViewBundle& view,
                                  std::int32_t instance,
                                  double depth_tolerance) {
  if (!cloud.has_instances()) {
    throw ConfigError("point cloud carries no instance ids");
  }
  const auto hits =
      geometry::BuildPointPixelMap(cloud, view, depth_tolerance);
  const auto fractions = InstanceVisibilityFractions(cloud, hits);
  const auto it = fractions.find(instance);
  if (it == fractions.end()) {
    throw LookupError("unknown instance id " + std::to_string(instance));
  }
  return it->second;
}

FusionAccumulator::FusionAccumulator(const ScenePointCloud& cloud, int dim,
                                     OcclusionPolicy policy)
    : cloud_(cloud),
      dim_(dim),
      policy_(policy),
      sums_(cloud.size() * static_cast<std::size_t>(dim), 0.0),
      counts_(cloud.size(), 0) {
  policy_.Validate();
  if (policy_.mode == OcclusionMode::kOccludedOnly) {
    if (!cloud.has_instances()) {
      throw ConfigError("occluded-only fusion needs instance ids");
    }
    instance_sizes_ = InstanceSizes(cloud);
  }
}

void FusionAccumulator::AddView(const geometry::PointPixelMap& hits,
                                const DenseFeatureMap& map) {
  if (map.dim() != dim_) {
    throw ConfigError("view feature dim " + std::to_string(map.dim()) +
                      " differs from fusion dim " + std::to_string(dim_));
  }
  std::unordered_map<std::int32_t, double> fractions;
  if (policy_.mode == OcclusionMode::kOccludedOnly) {
    fractions = InstanceVisibilityFractions(cloud_, hits);
  }
  for (const auto& hit : hits) {
    if (policy_.mode == OcclusionMode::kOccludedOnly) {
      const std::int32_t id = cloud_.instances[hit.point];
      if (id < 0 || !(fractions.at(id) < policy_.threshold)) continue;
    }
    if (hit.row >= map.height() || hit.col >= map.width()) {
      throw ConfigError("correspondence lies outside the feature map");
    }
    const auto feature = map.at(hit.row, hit.col);
    double* sum = sums_.data() + static_cast<std::size_t>(hit.point) * dim_;
    for (int k = 0; k < dim_; ++k) sum[k] += feature[k];
    ++counts_[hit.point];
  }
}

PointFeatureField FusionAccumulator::Finish() const {
  PointFeatureField out(cloud_.size(), dim_);
  for (std::size_t i = 0; i < cloud_.size(); ++i) {
    const std::uint32_t n = counts_[i];
    if (n == 0) continue;
    const double* sum = sums_.data() + i * dim_;
    auto row = out.row(i);
    for (int k = 0; k < dim_; ++k) row[k] = static_cast<float>(sum[k] / n);
    out.set_count(i, n);
  }
  return out;
}

PointFeatureField FuseMultiview(const ScenePointCloud& cloud,
                                std::span<const ViewBundle> views,
                                std::span<const DenseFeatureMap> maps,
                                const OcclusionPolicy& policy,
                                double depth_tolerance, unsigned threads) {
  if (views.size() != maps.size()) {
    throw ConfigError(std::to_string(views.size()) + " views but " +
                      std::to_string(maps.size()) + " feature maps");
  }
  if (maps.empty()) {
    throw ConfigError("fusion needs at least one view");
  }
  const int dim = maps.front().dim();
  for (std::size_t v = 0; v < views.size(); ++v) {
    if (maps[v].height() != views[v].camera.height() ||
        maps[v].width() != views[v].camera.width() || maps[v].dim() != dim) {
      throw ConfigError("feature map " + std::to_string(v) +
                        " does not match its view");
    }
    if (!maps[v].all_valid()) {
      throw DataError("feature map " + std::to_string(v) +
                      " must be valid at every pixel");
    }
  }
  std::vector<geometry::PointPixelMap> hits(views.size());
  ParallelFor(views.size(), threads, [&](std::size_t v) {
    hits[v] = geometry::BuildPointPixelMap(cloud, views[v], depth_tolerance);
  });
  FusionAccumulator accumulator(cloud, dim, policy);
  for (std::size_t v = 0; v < views.size(); ++v) {
    accumulator.AddView(hits[v], maps[v]);
  }
  return accumulator.Finish();
}

}  // namespace mvov3d::fusion
