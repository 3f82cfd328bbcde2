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

#ifndef MVOV3D_MERGE_H_
#define MVOV3D_MERGE_H_

#include "mvov3d/feature_map.h"

namespace mvov3d::merge {

// Per pixel, the mean of the defined contributors among the base VLM
// feature, the region map and the text map. The base must be valid at
// every pixel, so the result is valid everywhere. The output is not
// renormalized.
//
// Throws ConfigError on a shape mismatch and DataError if the base has an
// invalid pixel.
DenseFeatureMap MergePixelFeatures(const DenseFeatureMap& base,
                                   const SparseFeatureMap& region,
                                   const SparseFeatureMap& text);

}  // namespace mvov3d::merge

#endif  // MVOV3D_MERGE_H_
