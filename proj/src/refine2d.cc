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

#include "mvov3d/refine2d.h"

#include <string>
#include <vector>

#include "mvov3d/errors.h"

namespace mvov3d::refine2d {

SparseFeatureMap FloodRegionFeatures(const RegionMask& region) {
  SparseFeatureMap out(region.height(), region.width(), region.dim());
  const std::vector<float>& embedding = region.embedding();
  for (int r = 0; r < region.height(); ++r) {
    for (int c = 0; c < region.width(); ++c) {
      if (!region.contains(r, c)) continue;
      std::copy(embedding.begin(), embedding.end(), out.at(r, c).begin());
      out.set_count(r, c, 1);
    }
  }
  return out;
}

SparseFeatureMap ComposeFloodedMaps(MapShape shape,
                                    std::span<const FloodSource> sources) {
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const FloodSource& source = sources[s];
    if (source.mask == nullptr) {
      throw ConfigError("flood source " + std::to_string(s) + " has no mask");
    }
    if (source.mask->height() != shape.height ||
        source.mask->width() != shape.width ||
        static_cast<int>(source.embedding.size()) != shape.dim) {
      throw ConfigError("flood source " + std::to_string(s) +
                        " does not match the map shape");
    }
  }
  SparseFeatureMap out(shape.height, shape.width, shape.dim);
  std::vector<double> sum(shape.dim);
  for (int r = 0; r < shape.height; ++r) {
    for (int c = 0; c < shape.width; ++c) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::uint32_t covering = 0;
      for (const FloodSource& source : sources) {
        if (!source.mask->contains(r, c)) continue;
        for (int k = 0; k < shape.dim; ++k) sum[k] += source.embedding[k];
        ++covering;
      }
      if (covering == 0) continue;
      auto pixel = out.at(r, c);
      for (int k = 0; k < shape.dim; ++k) {
        pixel[k] = static_cast<float>(sum[k] / covering);
      }
      out.set_count(r, c, covering);
    }
  }
  return out;
}

SparseFeatureMap ComposeRegionMaps(MapShape shape,
                                   std::span<const RegionMask> regions) {
  std::vector<FloodSource> sources;
  sources.reserve(regions.size());
  for (const RegionMask& region : regions) {
    sources.push_back({&region, region.embedding()});
  }
  return ComposeFloodedMaps(shape, sources);
}

}  // namespace mvov3d::refine2d
