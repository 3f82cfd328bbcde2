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

#ifndef MVOV3D_REFINE2D_H_
#define MVOV3D_REFINE2D_H_

#include <span>
#include <vector>

#include "mvov3d/feature_map.h"
#include "mvov3d/scene.h"

namespace mvov3d::refine2d {

struct MapShape {
  int height = 0;
  int width = 0;
  int dim = 0;
};

// A mask to be flood-filled with one embedding.
struct FloodSource {
  const RegionMask* mask = nullptr;
  std::span<const float> embedding;
};

// Region embedding copied onto every pixel of its mask; undefined elsewhere.
SparseFeatureMap FloodRegionFeatures(const RegionMask& region);

// Per pixel, the mean embedding over all sources whose mask covers it, with
// the count set to the number of covering sources. Sources are accumulated
// in list order, in double precision. Throws ConfigError if a source does
// not match `shape`.
SparseFeatureMap ComposeFloodedMaps(MapShape shape,
                                    std::span<const FloodSource> sources);

// ComposeFloodedMaps over the regions' own embeddings.
SparseFeatureMap ComposeRegionMaps(MapShape shape,
                                   std::span<const RegionMask> regions);

}  // namespace mvov3d::refine2d

#endif  // MVOV3D_REFINE2D_H_
