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

#include "mvov3d/refine1d.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvov3d/errors.h"

namespace mvov3d::refine1d {

double CosineSimilarity(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) {
    throw ConfigError("cosine of vectors with lengths " +
                      std::to_string(a.size()) + " and " +
                      std::to_string(b.size()));
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    aa += static_cast<double>(a[i]) * a[i];
    bb += static_cast<double>(b[i]) * b[i];
  }
  if (aa == 0.0 || bb == 0.0) {
    throw DegenerateInputError("cosine similarity of a zero vector");
  }
  return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

TextSelection SelectText(std::span<const float> region_embedding,
                         const TextProposalSet& proposals, double delta) {
  if (proposals.empty()) return std::nullopt;
  std::size_t best = 0;
  double best_score = CosineSimilarity(region_embedding, proposals[0].embedding);
  for (std::size_t t = 1; t < proposals.size(); ++t) {
    const double score =
        CosineSimilarity(region_embedding, proposals[t].embedding);
    if (score > best_score) {
      best = t;
      best_score = score;
    }
  }
  if (!(best_score > delta)) return std::nullopt;
  return SelectedText{best, proposals[best].text, proposals[best].embedding,
                      best_score};
}

SparseFeatureMap FloodTextFeatures(const TextSelection& selection,
                                   const RegionMask& mask) {
  if (!selection) {
    return SparseFeatureMap(mask.height(), mask.width(), mask.dim());
  }
  const int dim = static_cast<int>(selection->embedding.size());
  SparseFeatureMap out(mask.height(), mask.width(), dim);
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.contains(r, c)) continue;
      std::copy(selection->embedding.begin(), selection->embedding.end(),
                out.at(r, c).begin());
      out.set_count(r, c, 1);
    }
  }
  return out;
}

std::vector<TextSelection> SelectViewTexts(
    std::span<const RegionMask> regions,
    std::span<const TextProposalSet> proposals, double delta) {
  std::vector<TextSelection> selections(regions.size());
  if (proposals.empty()) return selections;
  if (proposals.size() != regions.size()) {
    throw ConfigError("proposal sets (" + std::to_string(proposals.size()) +
                      ") do not match regions (" +
                      std::to_string(regions.size()) + ")");
  }
  for (std::size_t s = 0; s < regions.size(); ++s) {
    selections[s] = SelectText(regions[s].embedding(), proposals[s], delta);
  }
  return selections;
}

SparseFeatureMap ComposeTextMaps(refine2d::MapShape shape,
                                 std::span<const RegionMask> regions,
                                 std::span<const TextSelection> selections) {
  if (selections.size() != regions.size()) {
    throw ConfigError("text selections do not match regions");
  }
  std::vector<refine2d::FloodSource> sources;
  for (std::size_t s = 0; s < regions.size(); ++s) {
    if (selections[s]) {
      sources.push_back({&regions[s], selections[s]->embedding});
    }
  }
  return refine2d::ComposeFloodedMaps(shape, sources);
}

}  // namespace mvov3d::refine1d
