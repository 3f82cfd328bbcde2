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

#ifndef MVOV3D_SCENE_H_
#define MVOV3D_SCENE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mvov3d/camera.h"
#include "mvov3d/feature_map.h"

namespace mvov3d {

// M points with optional unit normals, ground-truth labels and instance ids.
// Optional attributes are either empty or hold exactly M entries.
struct ScenePointCloud {
  std::vector<Eigen::Vector3f> positions;
  std::vector<Eigen::Vector3f> normals;
  std::vector<std::int32_t> labels;
  std::vector<std::int32_t> instances;

  std::size_t size() const { return positions.size(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_labels() const { return !labels.empty(); }
  bool has_instances() const { return !instances.empty(); }

  // Throws DataError on size mismatches, non-finite positions or normals
  // that are not unit length within 1e-3.
  void Validate() const;
};

// Binary mask of one image region with the embedding of the region crop.
class RegionMask {
 public:
  RegionMask() = default;
  // Throws DataError if the mask is empty, its size is not height*width,
  // the embedding is empty or non-finite, or confidence is outside [0, 1].
  RegionMask(int height, int width, std::vector<std::uint8_t> mask,
             std::vector<float> embedding, float confidence = 1.0f);

  int height() const { return height_; }
  int width() const { return width_; }
  int dim() const { return static_cast<int>(embedding_.size()); }
  bool contains(int row, int col) const {
    return mask_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  const std::vector<std::uint8_t>& mask() const { return mask_; }
  const std::vector<float>& embedding() const { return embedding_; }
  float confidence() const { return confidence_; }
  std::size_t area() const { return area_; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> mask_;
  std::vector<float> embedding_;
  float confidence_ = 1.0f;
  std::size_t area_ = 0;
};

struct TextProposal {
  std::string text;
  std::vector<float> embedding;
};

// Candidate descriptions of a single region; may be empty.
using TextProposalSet = std::vector<TextProposal>;

// Everything known about one image: camera, depth, dense VLM features,
// region masks and, per region, its text proposals.
struct ViewBundle {
  std::string image_id;
  CameraModel camera;
  DepthMap depth;
  DenseFeatureMap features;
  std::vector<RegionMask> regions;
  // Either empty or one entry per region.
  std::vector<TextProposalSet> proposals;

  // Checks mutual consistency of all parts against feature dim `dim`.
  // Throws DataError / ConfigError naming the offending part.
  void Validate(int dim) const;
};

}  // namespace mvov3d

#endif  // MVOV3D_SCENE_H_
