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

#include "mvov3d/camera.h"

#include <cmath>
#include <string>
#include <utility>

#include <Eigen/Geometry>

#include "mvov3d/errors.h"

namespace mvov3d {

CameraModel CameraModel::Create(const Eigen::Matrix3d& intrinsics,
                                const Eigen::Matrix4d& world_to_camera,
                                int width, int height) {
  if (!intrinsics.allFinite() || !world_to_camera.allFinite()) {
    throw ConfigError("camera matrices must be finite");
  }
  if (width <= 0 || height <= 0) {
    throw ConfigError("camera size must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  const double fx = intrinsics(0, 0), fy = intrinsics(1, 1);
  const double cx = intrinsics(0, 2), cy = intrinsics(1, 2);
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw ConfigError("focal lengths must be positive");
  }
  if (!(cx > 0.0 && cx < width) || !(cy > 0.0 && cy < height)) {
    throw ConfigError("principal point lies outside the image");
  }
  if (intrinsics(0, 1) != 0.0 || intrinsics(1, 0) != 0.0 ||
      intrinsics(2, 0) != 0.0 || intrinsics(2, 1) != 0.0 ||
      intrinsics(2, 2) != 1.0) {
    throw ConfigError("intrinsics must have the form [fx 0 cx; 0 fy cy; 0 0 1]");
  }
  const Eigen::Matrix3d rotation = world_to_camera.topLeftCorner<3, 3>();
  const double ortho_error =
      (rotation.transpose() * rotation - Eigen::Matrix3d::Identity())
          .cwiseAbs()
          .maxCoeff();
  if (ortho_error > 1e-5 || rotation.determinant() < 0.0) {
    throw ConfigError("extrinsic rotation is not a proper rotation (error " +
                      std::to_string(ortho_error) + ")");
  }
  if (world_to_camera.row(3) != Eigen::RowVector4d(0, 0, 0, 1)) {
    throw ConfigError("extrinsics bottom row must be [0 0 0 1]");
  }
  CameraModel camera;
  camera.intrinsics_ = intrinsics;
  camera.extrinsics_ = world_to_camera;
  camera.width_ = width;
  camera.height_ = height;
  return camera;
}

Eigen::Vector3d CameraModel::BackProject(double row, double col,
                                         double depth) const {
  const Eigen::Vector3d in_camera((col - cx()) * depth / fx(),
                                  (row - cy()) * depth / fy(), depth);
  const Eigen::Matrix3d rotation = extrinsics_.topLeftCorner<3, 3>();
  return rotation.transpose() *
         (in_camera - extrinsics_.topRightCorner<3, 1>());
}

Eigen::Matrix4d LookAt(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  const Eigen::Vector3d right = forward.cross(up).normalized();
  // Image rows grow downwards, so camera +y is world "down".
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d rotation;
  rotation.row(0) = right.transpose();
  rotation.row(1) = down.transpose();
  rotation.row(2) = forward.transpose();
  Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
  transform.topLeftCorner<3, 3>() = rotation;
  transform.topRightCorner<3, 1>() = -rotation * eye;
  return transform;
}

DepthMap::DepthMap(int height, int width, std::vector<float> values)
    : height_(height), width_(width), values_(std::move(values)) {
  if (height < 0 || width < 0 ||
      values_.size() != static_cast<std::size_t>(height) * width) {
    throw ConfigError("depth map holds " + std::to_string(values_.size()) +
                      " values, expected " + std::to_string(height) + "x" +
                      std::to_string(width));
  }
  for (float v : values_) {
    if (!std::isfinite(v) || v < 0.0f) {
      throw DataError("depth values must be finite and non-negative");
    }
  }
}

}  // namespace mvov3d
