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

#include "mvov3d/scene.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mvov3d/errors.h"

namespace mvov3d {
namespace {

bool AllFinite(const std::vector<float>& values) {
  return std::all_of(values.begin(), values.end(),
                     [](float v) { return std::isfinite(v); });
}

}  // namespace

void ScenePointCloud::Validate() const {
  const std::size_t m = positions.size();
  auto check_size = [m](std::size_t n, const char* what) {
    if (n != 0 && n != m) {
      throw DataError(std::string(what) + " has " + std::to_string(n) +
                      " entries for " + std::to_string(m) + " points");
    }
  };
  check_size(normals.size(), "normals");
  check_size(labels.size(), "labels");
  check_size(instances.size(), "instances");
  for (std::size_t i = 0; i < m; ++i) {
    if (!positions[i].allFinite()) {
      throw DataError("point " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const float norm = normals[i].norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0f) > 1e-3f) {
      throw DataError("normal " + std::to_string(i) + " is not unit length");
    }
  }
}

RegionMask::RegionMask(int height, int width, std::vector<std::uint8_t> mask,
                       std::vector<float> embedding, float confidence)
    : height_(height),
      width_(width),
      mask_(std::move(mask)),
      embedding_(std::move(embedding)),
      confidence_(confidence) {
  if (height <= 0 || width <= 0 ||
      mask_.size() != static_cast<std::size_t>(height) * width) {
    throw DataError("region mask size does not match " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  area_ = static_cast<std::size_t>(
      std::count_if(mask_.begin(), mask_.end(),
                    [](std::uint8_t v) { return v != 0; }));
  if (area_ == 0) throw DataError("region mask has no set pixel");
  if (embedding_.empty() || !AllFinite(embedding_)) {
    throw DataError("region embedding must be non-empty and finite");
  }
  if (!(confidence >= 0.0f && confidence <= 1.0f)) {
    throw DataError("region confidence must lie in [0, 1]");
  }
}

void ViewBundle::Validate(int dim) const {
  const std::string where = "view '" + image_id + "': ";
  const int h = camera.height(), w = camera.width();
  if (depth.height() != h || depth.width() != w) {
    throw ConfigError(where + "depth map is " + std::to_string(depth.height()) +
                      "x" + std::to_string(depth.width()) + ", camera is " +
                      std::to_string(h) + "x" + std::to_string(w));
  }
  if (features.height() != h || features.width() != w) {
    throw ConfigError(where + "feature map size differs from camera size");
  }
  if (features.dim() != dim) {
    throw ConfigError(where + "feature dim " + std::to_string(features.dim()) +
                      " differs from scene dim " + std::to_string(dim));
  }
  if (!features.all_valid()) {
    throw DataError(where + "VLM feature map must be valid at every pixel");
  }
  if (!AllFinite(features.data())) {
    throw DataError(where + "feature map contains non-finite values");
  }
  for (std::size_t s = 0; s < regions.size(); ++s) {
    const RegionMask& region = regions[s];
    if (region.height() != h || region.width() != w) {
      throw ConfigError(where + "region " + std::to_string(s) +
                        " mask size differs from camera size");
    }
    if (region.dim() != dim) {
      throw ConfigError(where + "region " + std::to_string(s) +
                        " embedding dim differs from scene dim");
    }
  }
  if (!proposals.empty() && proposals.size() != regions.size()) {
    throw ConfigError(where + "proposal lists (" +
                      std::to_string(proposals.size()) +
                      ") do not match regions (" +
                      std::to_string(regions.size()) + ")");
  }
  for (const TextProposalSet& set : proposals) {
    for (const TextProposal& proposal : set) {
      if (static_cast<int>(proposal.embedding.size()) != dim) {
        throw ConfigError(where + "proposal '" + proposal.text +
                          "' embedding dim differs from scene dim");
      }
      if (!AllFinite(proposal.embedding)) {
        throw DataError(where + "proposal '" + proposal.text +
                        "' embedding is not finite");
      }
    }
  }
}

}  // namespace mvov3d
