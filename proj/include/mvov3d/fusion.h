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

#ifndef MVOV3D_FUSION_H_
#define MVOV3D_FUSION_H_

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mvov3d/feature_map.h"
#include "mvov3d/geometry.h"
#include "mvov3d/scene.h"

namespace mvov3d::fusion {

enum class OcclusionMode {
  kUseAll,        // every visible correspondence is pooled
  kOccludedOnly,  // a view is pooled for an instance only below the threshold
};

// View admission rule for the occlusion diagnostic. Under kOccludedOnly a
// view is admitted for an instance iff the fraction of the instance's points
// visible in that view is strictly below `threshold`. Points without an
// instance id (negative) are never admitted in that mode.
struct OcclusionPolicy {
  OcclusionMode mode = OcclusionMode::kUseAll;
  double threshold = 1.0;

  // Throws ConfigError unless threshold lies in [0, 1].
  void Validate() const;
};

std::string ToString(OcclusionMode mode);
// Accepts "all" and "occluded-only".
OcclusionMode ParseOcclusionMode(const std::string& name);

// Per instance id, the number of its points.
std::unordered_map<std::int32_t, std::size_t> InstanceSizes(
    const ScenePointCloud& cloud);

// Per instance id, the fraction of its points present in `hits`.
std::unordered_map<std::int32_t, double> InstanceVisibilityFractions(
    const ScenePointCloud& cloud, const geometry::PointPixelMap& hits);

// Fraction of the instance's points visible in the view. Throws ConfigError
// if the cloud has no instance ids and LookupError for an unknown id.
double InstanceVisibilityFraction(const ScenePointCloud& cloud,
                                  const ViewBundle& view,
                                  std::int32_t instance,
                                  double depth_tolerance =
                                      geometry::kDefaultDepthTolerance);

// Sums admitted pixel features per point in double precision. Views are
// folded in the order they are added.
class FusionAccumulator {
 public:
  FusionAccumulator(const ScenePointCloud& cloud, int dim,
                    OcclusionPolicy policy);

  // Adds one view's visible correspondences, reading features from `map`.
  void AddView(const geometry::PointPixelMap& hits, const DenseFeatureMap& map);

  // Mean over admitted correspondences; points without any are invalid.
  PointFeatureField Finish() const;

 private:
  const ScenePointCloud& cloud_;
  int dim_;
  OcclusionPolicy policy_;
  std::unordered_map<std::int32_t, std::size_t> instance_sizes_;
  std::vector<double> sums_;
  std::vector<std::uint32_t> counts_;
};

// Average pooling of improved per-view pixel features onto the points that
// see them. `maps[i]` belongs to `views[i]`. Visibility is computed in
// parallel across views, reduction always happens in view order.
//
// Throws ConfigError when views and maps differ in count or shape.
PointFeatureField FuseMultiview(const ScenePointCloud& cloud,
                                std::span<const ViewBundle> views,
                                std::span<const DenseFeatureMap> maps,
                                const OcclusionPolicy& policy,
                                double depth_tolerance,
                                unsigned threads = 1);

}  // namespace mvov3d::fusion

#endif  // MVOV3D_FUSION_H_
