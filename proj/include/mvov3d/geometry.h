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

#ifndef MVOV3D_GEOMETRY_H_
#define MVOV3D_GEOMETRY_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "mvov3d/camera.h"
#include "mvov3d/scene.h"

namespace mvov3d::geometry {

inline constexpr double kDefaultDepthTolerance = 0.05;

struct PixelLocation {
  int row = 0;
  int col = 0;
  double depth = 0.0;  // camera-space z
};

// One visible point in one view.
struct PixelHit {
  std::uint32_t point = 0;
  int row = 0;
  int col = 0;
  float depth = 0.0f;
};

// Visible (point, pixel) pairs of one view, ordered by point index. Each
// point appears at most once.
using PointPixelMap = std::vector<PixelHit>;

// Pinhole projection with nearest-integer pixel rounding. Empty when the
// point is at or behind the camera plane or lands outside the image.
std::optional<PixelLocation> ProjectPoint(const Eigen::Vector3d& point,
                                          const CameraModel& camera);

// True iff the point projects into the image onto a valid depth pixel whose
// stored depth is within `depth_tolerance` of the projected depth.
// Throws ConfigError when the depth map and camera sizes differ.
bool VisibilityTest(const Eigen::Vector3d& point, const CameraModel& camera,
                    const DepthMap& depth, double depth_tolerance);

PointPixelMap BuildPointPixelMap(const ScenePointCloud& cloud,
                                 const ViewBundle& view,
                                 double depth_tolerance);

// Same as above over an explicit camera + depth pair.
PointPixelMap BuildPointPixelMap(const ScenePointCloud& cloud,
                                 const CameraModel& camera,
                                 const DepthMap& depth, double depth_tolerance);

}  // namespace mvov3d::geometry

#endif  // MVOV3D_GEOMETRY_H_
