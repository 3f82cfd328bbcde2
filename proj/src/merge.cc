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

#include "mvov3d/merge.h"

#include <algorithm>
#include <string>
#include <vector>

#include "mvov3d/errors.h"

namespace mvov3d::merge {
namespace {

void CheckShape(const DenseFeatureMap& base, const SparseFeatureMap& other,
                const char* name) {
  if (other.height() != base.height() || other.width() != base.width() ||
      other.dim() != base.dim()) {
    throw ConfigError(std::string(name) +
                      " map shape differs from the base feature map");
  }
}

}  // namespace

DenseFeatureMap MergePixelFeatures(const DenseFeatureMap& base,
                                   const SparseFeatureMap& region,
                                   const SparseFeatureMap& text) {
  CheckShape(base, region, "region");
  CheckShape(base, text, "text");
  if (!base.all_valid()) {
    throw DataError("base feature map must be valid at every pixel");
  }
  const int dim = base.dim();
  DenseFeatureMap out(base.height(), base.width(), dim);
  std::vector<double> sum(dim);
  for (int r = 0; r < base.height(); ++r) {
    for (int c = 0; c < base.width(); ++c) {
      // base + (region + text) keeps the result symmetric in region/text.
      std::fill(sum.begin(), sum.end(), 0.0);
      int contributors = 1;
      if (region.defined(r, c)) {
        const auto f = region.at(r, c);
        for (int k = 0; k < dim; ++k) sum[k] = f[k];
        ++contributors;
      }
      if (text.defined(r, c)) {
        const auto f = text.at(r, c);
        for (int k = 0; k < dim; ++k) sum[k] += f[k];
        ++contributors;
      }
      const auto b = base.at(r, c);
      for (int k = 0; k < dim; ++k) sum[k] += b[k];
      auto o = out.at(r, c);
      for (int k = 0; k < dim; ++k) {
        o[k] = static_cast<float>(sum[k] / contributors);
      }
      out.set_valid(r, c, true);
    }
  }
  return out;
}

}  // namespace mvov3d::merge
