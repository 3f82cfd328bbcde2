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

#ifndef MVOV3D_REFINE1D_H_
#define MVOV3D_REFINE1D_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvov3d/feature_map.h"
#include "mvov3d/refine2d.h"
#include "mvov3d/scene.h"

namespace mvov3d::refine1d {

// Best-matching confidence thresholds per dataset profile.
inline constexpr double kDeltaScanNet200 = 0.24;
inline constexpr double kDeltaMatterport3D = 0.24;
inline constexpr double kDeltaReplica = 0.26;

// a.b / (|a||b|), clamped to [-1, 1]. Throws DegenerateInputError for a zero
// vector and ConfigError for a length mismatch.
double CosineSimilarity(std::span<const float> a, std::span<const float> b);

struct SelectedText {
  std::size_t index = 0;
  std::string text;
  std::vector<float> embedding;
  double score = 0.0;
};

// Empty when no proposal clears the threshold.
using TextSelection = std::optional<SelectedText>;

// Takes the proposal with the highest cosine similarity to the region
// embedding (lowest index on ties) and keeps it only if its score is
// strictly greater than `delta`.
TextSelection SelectText(std::span<const float> region_embedding,
                         const TextProposalSet& proposals, double delta);

// Selected text embedding copied onto every pixel of the mask; an empty
// selection yields an all-undefined map.
SparseFeatureMap FloodTextFeatures(const TextSelection& selection,
                                   const RegionMask& mask);

// Runs SelectText for every region of a view. `proposals` is empty or holds
// one set per region.
std::vector<TextSelection> SelectViewTexts(
    std::span<const RegionMask> regions,
    std::span<const TextProposalSet> proposals, double delta);

// Averages the flooded text embeddings of all accepted selections.
SparseFeatureMap ComposeTextMaps(refine2d::MapShape shape,
                                 std::span<const RegionMask> regions,
                                 std::span<const TextSelection> selections);

}  // namespace mvov3d::refine1d

#endif  // MVOV3D_REFINE1D_H_
