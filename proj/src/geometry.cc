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

#include "mvov3d/geometry.h"

#include <cmath>
#include <string>

#include "mvov3d/errors.h"

namespace mvov3d::geometry {
namespace {

void CheckDepthSize(const CameraModel& camera, const DepthMap& depth) {
  if (depth.height() != camera.height() || depth.width() != camera.width()) {
    throw ConfigError("depth map " + std::to_string(depth.height()) + "x" +
                      std::to_string(depth.width()) +
                      " does not match camera " +
                      std::to_string(camera.height()) + "x" +
                      std::to_string(camera.width()));
  }
}

bool PassesDepthTest(const PixelLocation& pixel, const DepthMap& depth,
                     double depth_tolerance) {
  if (!depth.valid(pixel.row, pixel.col)) return false;
  const double stored = depth.at(pixel.row, pixel.col);
  return std::abs(pixel.depth - stored) <= depth_tolerance;
}

}  // namespace

std::optional<PixelLocation> ProjectPoint(const Eigen::Vector3d& point,
                                          const CameraModel& camera) {
  const Eigen::Vector3d p = camera.WorldToCamera(point);
  if (!(p.z() > 0.0)) return std::nullopt;
  const double x = camera.fx() * p.x() / p.z() + camera.cx();
  const double y = camera.fy() * p.y() / p.z() + camera.cy();
  const double col = std::floor(x + 0.5);
  const double row = std::floor(y + 0.5);
  if (!(col >= 0.0 && col < camera.width() && row >= 0.0 &&
        row < camera.height())) {
    return std::nullopt;
  }
  return PixelLocation{static_cast<int>(row), static_cast<int>(col), p.z()};
}

bool VisibilityTest(const Eigen::Vector3d& point, const CameraModel& camera,
                    const DepthMap& depth, double depth_tolerance) {
  CheckDepthSize(camera, depth);
  const auto pixel = ProjectPoint(point, camera);
  return pixel && PassesDepthTest(*pixel, depth, depth_tolerance);
}

PointPixelMap BuildPointPixelMap(const ScenePointCloud& cloud,
                                 const CameraModel& camera,
                                 const DepthMap& depth,
                                 double depth_tolerance) {
  CheckDepthSize(camera, depth);
  PointPixelMap hits;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto pixel = ProjectPoint(cloud.positions[i].cast<double>(), camera);
    if (pixel && PassesDepthTest(*pixel, depth, depth_tolerance)) {
      hits.push_back({static_cast<std::uint32_t>(i), pixel->row, pixel->col,
                      static_cast<float>(pixel->depth)});
    }
  }
  return hits;
}

PointPixelMap BuildPointPixelMap(const ScenePointCloud& cloud,
                                 const ViewBundle& view,
                                 double depth_tolerance) {
  return BuildPointPixelMap(cloud, view.camera, view.depth, depth_tolerance);
}

}  // namespace mvov3d::geometry
