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

#include "mvov3d/feature_map.h"

#include <algorithm>
#include <string>
#include <utility>

#include "mvov3d/errors.h"

namespace mvov3d {
namespace {

void CheckShape(int height, int width, int dim) {
  if (height < 0 || width < 0 || dim < 0) {
    throw ConfigError("negative feature map shape");
  }
}

}  // namespace

DenseFeatureMap::DenseFeatureMap(int height, int width, int dim)
    : height_(height), width_(width), dim_(dim) {
  CheckShape(height, width, dim);
  data_.assign(num_pixels() * dim, 0.0f);
  valid_.assign(num_pixels(), 0);
}

DenseFeatureMap::DenseFeatureMap(int height, int width, int dim,
                                 std::vector<float> data)
    : height_(height), width_(width), dim_(dim), data_(std::move(data)) {
  CheckShape(height, width, dim);
  if (data_.size() != num_pixels() * dim) {
    throw ConfigError("dense feature data has " + std::to_string(data_.size()) +
                      " values, expected " +
                      std::to_string(num_pixels() * dim));
  }
  valid_.assign(num_pixels(), 1);
}

bool DenseFeatureMap::all_valid() const {
  return std::all_of(valid_.begin(), valid_.end(),
                     [](std::uint8_t v) { return v != 0; });
}

SparseFeatureMap::SparseFeatureMap(int height, int width, int dim)
    : height_(height), width_(width), dim_(dim) {
  CheckShape(height, width, dim);
  const std::size_t pixels = static_cast<std::size_t>(height) * width;
  data_.assign(pixels * dim, 0.0f);
  counts_.assign(pixels, 0);
}

std::size_t SparseFeatureMap::num_defined() const {
  return static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(),
                    [](std::uint32_t c) { return c > 0; }));
}

PointFeatureField::PointFeatureField(std::size_t num_points, int dim)
    : dim_(dim), data_(num_points * dim, 0.0f), counts_(num_points, 0) {
  if (dim < 0) throw ConfigError("negative feature dimension");
}

PointFeatureField::PointFeatureField(std::size_t num_points, int dim,
                                     std::vector<float> data,
                                     std::vector<std::uint32_t> counts)
    : dim_(dim), data_(std::move(data)), counts_(std::move(counts)) {
  if (dim < 0) throw ConfigError("negative feature dimension");
  if (counts_.size() != num_points || data_.size() != num_points * dim) {
    throw ConfigError("point feature field storage does not match " +
                      std::to_string(num_points) + " x " +
                      std::to_string(dim));
  }
}

std::size_t PointFeatureField::num_valid() const {
  return static_cast<std::size_t>(
      std::count_if(counts_.begin(), counts_.end(),
                    [](std::uint32_t c) { return c > 0; }));
}

}  // namespace mvov3d
