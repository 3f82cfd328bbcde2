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

#ifndef MVOV3D_CAMERA_H_
#define MVOV3D_CAMERA_H_

#include <vector>

#include <Eigen/Core>

namespace mvov3d {

// Pinhole camera: 3x3 intrinsics (zero skew) and a 4x4 rigid world-to-camera
// transform. Pixel (row, col) has its center at image coordinates
// (x = col, y = row); camera +z looks into the scene.
class CameraModel {
 public:
  CameraModel() = default;

  // Validates fx, fy > 0, 0 < cx < width, 0 < cy < height, and that the
  // extrinsic rotation is orthonormal (within 1e-5) with determinant +1.
  // Throws ConfigError otherwise.
  static CameraModel Create(const Eigen::Matrix3d& intrinsics,
                            const Eigen::Matrix4d& world_to_camera, int width,
                            int height);

  double fx() const { return intrinsics_(0, 0); }
  double fy() const { return intrinsics_(1, 1); }
  double cx() const { return intrinsics_(0, 2); }
  double cy() const { return intrinsics_(1, 2); }
  int width() const { return width_; }
  int height() const { return height_; }
  const Eigen::Matrix3d& intrinsics() const { return intrinsics_; }
  const Eigen::Matrix4d& extrinsics() const { return extrinsics_; }

  Eigen::Vector3d WorldToCamera(const Eigen::Vector3d& world) const {
    return extrinsics_.topLeftCorner<3, 3>() * world +
           extrinsics_.topRightCorner<3, 1>();
  }
  // World position of the point at camera-space depth `depth` along the ray
  // through image coordinates (row, col).
  Eigen::Vector3d BackProject(double row, double col, double depth) const;

 private:
  Eigen::Matrix3d intrinsics_ = Eigen::Matrix3d::Identity();
  Eigen::Matrix4d extrinsics_ = Eigen::Matrix4d::Identity();
  int width_ = 0;
  int height_ = 0;
};

// Builds a world-to-camera transform for a camera at `eye` looking at
// `target`, with image rows pointing along -`up`.
Eigen::Matrix4d LookAt(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
                       const Eigen::Vector3d& up);

// H x W depth in meters; 0 marks an invalid pixel.
class DepthMap {
 public:
  DepthMap() = default;
  // Throws DataError on non-finite or negative values, ConfigError on a
  // size mismatch.
  DepthMap(int height, int width, std::vector<float> values);

  int height() const { return height_; }
  int width() const { return width_; }
  float at(int row, int col) const {
    return values_[static_cast<std::size_t>(row) * width_ + col];
  }
  bool valid(int row, int col) const { return at(row, col) > 0.0f; }
  const std::vector<float>& values() const { return values_; }

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<float> values_;
};

}  // namespace mvov3d

#endif  // MVOV3D_CAMERA_H_
