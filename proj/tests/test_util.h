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

#ifndef MVOV3D_TESTS_TEST_UTIL_H_
#define MVOV3D_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mvov3d/camera.h"
#include "mvov3d/scene.h"

namespace mvov3d::testing {

using Rng = std::mt19937_64;

inline std::vector<float> RandomVector(Rng& rng, int dim, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<float> v(dim);
  for (float& x : v) x = static_cast<float>(normal(rng));
  return v;
}

inline std::vector<std::uint8_t> RandomMask(Rng& rng, int height, int width,
                                            double density) {
  std::bernoulli_distribution on(density);
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(height) * width);
  for (auto& m : mask) m = on(rng) ? 1 : 0;
  // Masks must not be empty.
  std::uniform_int_distribution<std::size_t> pick(0, mask.size() - 1);
  mask[pick(rng)] = 1;
  return mask;
}

inline Eigen::Matrix3d Intrinsics(double f, int width, int height) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = f;
  k(1, 1) = f;
  k(0, 2) = 0.5 * width;
  k(1, 2) = 0.5 * height;
  return k;
}

inline Eigen::Matrix4d RandomRigid(Rng& rng, double max_translation) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-max_translation,
                                                 max_translation);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  Eigen::Matrix4d t = Eigen::Matrix4d::Identity();
  t.topLeftCorner<3, 3>() = q.toRotationMatrix();
  t(0, 3) = uniform(rng);
  t(1, 3) = uniform(rng);
  t(2, 3) = uniform(rng);
  return t;
}

// Camera at `eye` looking at `target` with a 64x48 image.
inline CameraModel LookAtCamera(const Eigen::Vector3d& eye,
                                const Eigen::Vector3d& target,
                                int width = 64, int height = 48,
                                double focal = 57.6) {
  return CameraModel::Create(Intrinsics(focal, width, height),
                             LookAt(eye, target, Eigen::Vector3d::UnitZ()),
                             width, height);
}

}  // namespace mvov3d::testing

#endif  // MVOV3D_TESTS_TEST_UTIL_H_
