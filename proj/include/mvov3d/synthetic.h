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

#ifndef MVOV3D_SYNTHETIC_H_
#define MVOV3D_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mvov3d/camera.h"
#include "mvov3d/scene_io.h"

namespace mvov3d::synthetic {

// Parameters of a generated scene. Every instance is a rectangular panel;
// each instance gets its own class.
struct SyntheticSpec {
  int planes = 4;              // target panels
  int points_per_plane = 400;  // uniform samples per panel
  int views = 6;
  double noise_sigma = 0.0;  // per-pixel, per-channel VLM feature noise
  int occluders = 0;         // small panels between cameras and targets
  // Noise on region embeddings; negative means noise_sigma / 2.
  double region_noise_sigma = -1.0;
  // When set, pixel noise for an instance in a view is
  // noise_sigma * (1 - visibility fraction of that instance in that view).
  bool occlusion_noise = false;
  int feature_dim = 16;
  int width = 64;
  int height = 48;
  int distractors = 3;  // extra (wrong) text proposals per region
  double depth_tolerance = 0.05;
};

struct Panel {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d right = Eigen::Vector3d::UnitX();  // unit
  Eigen::Vector3d up = Eigen::Vector3d::UnitZ();     // unit, orthogonal to right
  double half_width = 0.4;
  double half_height = 0.4;

  Eigen::Vector3d normal() const { return right.cross(up); }
  // Ray parameter of the hit with the panel's rectangle, if any.
  std::optional<double> Intersect(const Eigen::Vector3d& origin,
                                  const Eigen::Vector3d& direction) const;
};

struct CameraPose {
  Eigen::Vector3d eye;
  Eigen::Vector3d target;
};

// Geometry of a scene: panels [0, planes) are targets, the rest occluders.
struct SyntheticLayout {
  std::vector<Panel> panels;
  std::vector<CameraPose> cameras;
};

// The default row-of-panels layout used by GenerateSyntheticScene.
SyntheticLayout DefaultLayout(const SyntheticSpec& spec, std::uint64_t seed);

// Intrinsics shared by all synthetic cameras.
Eigen::Matrix3d SyntheticIntrinsics(const SyntheticSpec& spec);

// Exact depth (0 where no panel is hit) and the id of the panel seen at
// every pixel (-1 for background).
struct Rendering {
  DepthMap depth;
  std::vector<std::int32_t> instance;
};
Rendering Render(const SyntheticLayout& layout, const CameraModel& camera);

// Samples points, renders every view and synthesizes features, regions and
// text proposals. Deterministic for a given seed.
io::Scene BuildSyntheticScene(const SyntheticLayout& layout,
                              const SyntheticSpec& spec, std::uint64_t seed);

io::Scene GenerateSyntheticScene(std::uint64_t seed, const SyntheticSpec& spec);

// Generates and saves a scene; returns the manifest path.
std::filesystem::path GenerateSynthetic(std::uint64_t seed,
                                        const SyntheticSpec& spec,
                                        const std::filesystem::path& directory);

}  // namespace mvov3d::synthetic

#endif  // MVOV3D_SYNTHETIC_H_
