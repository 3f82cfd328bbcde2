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

#ifndef MVOV3D_FEATURE_MAP_H_
#define MVOV3D_FEATURE_MAP_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mvov3d {

// H x W x C per-pixel features with an explicit per-pixel validity flag.
// VLM-sourced maps are valid at every pixel.
class DenseFeatureMap {
 public:
  DenseFeatureMap() = default;
  // All pixels invalid, features zero.
  DenseFeatureMap(int height, int width, int dim);
  // Takes ownership of row-major H*W*C data; every pixel valid.
  DenseFeatureMap(int height, int width, int dim, std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int dim() const { return dim_; }
  std::size_t num_pixels() const {
    return static_cast<std::size_t>(height_) * width_;
  }

  std::span<float> at(int row, int col) {
    return {data_.data() + Offset(row, col), static_cast<std::size_t>(dim_)};
  }
  std::span<const float> at(int row, int col) const {
    return {data_.data() + Offset(row, col), static_cast<std::size_t>(dim_)};
  }
  bool valid(int row, int col) const {
    return valid_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set_valid(int row, int col, bool v) {
    valid_[static_cast<std::size_t>(row) * width_ + col] = v ? 1 : 0;
  }
  bool all_valid() const;

  const std::vector<float>& data() const { return data_; }
  const std::vector<std::uint8_t>& validity() const { return valid_; }

 private:
  std::size_t Offset(int row, int col) const {
    return (static_cast<std::size_t>(row) * width_ + col) * dim_;
  }

  int height_ = 0;
  int width_ = 0;
  int dim_ = 0;
  std::vector<float> data_;
  std::vector<std::uint8_t> valid_;
};

// H x W x C features defined only where count > 0. The count records how
// many sources were averaged into the pixel.
class SparseFeatureMap {
 public:
  SparseFeatureMap() = default;
  SparseFeatureMap(int height, int width, int dim);

  int height() const { return height_; }
  int width() const { return width_; }
  int dim() const { return dim_; }

  std::span<float> at(int row, int col) {
    return {data_.data() + Offset(row, col), static_cast<std::size_t>(dim_)};
  }
  std::span<const float> at(int row, int col) const {
    return {data_.data() + Offset(row, col), static_cast<std::size_t>(dim_)};
  }
  std::uint32_t count(int row, int col) const {
    return counts_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set_count(int row, int col, std::uint32_t c) {
    counts_[static_cast<std::size_t>(row) * width_ + col] = c;
  }
  bool defined(int row, int col) const { return count(row, col) > 0; }
  std::size_t num_defined() const;

  const std::vector<float>& data() const { return data_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  std::size_t Offset(int row, int col) const {
    return (static_cast<std::size_t>(row) * width_ + col) * dim_;
  }

  int height_ = 0;
  int width_ = 0;
  int dim_ = 0;
  std::vector<float> data_;
  std::vector<std::uint32_t> counts_;
};

// M x C per-point features. A point is valid iff its contribution count
// is at least one.
class PointFeatureField {
 public:
  PointFeatureField() = default;
  PointFeatureField(std::size_t num_points, int dim);
  PointFeatureField(std::size_t num_points, int dim, std::vector<float> data,
                    std::vector<std::uint32_t> counts);

  std::size_t num_points() const { return counts_.size(); }
  int dim() const { return dim_; }

  std::span<float> row(std::size_t point) {
    return {data_.data() + point * dim_, static_cast<std::size_t>(dim_)};
  }
  std::span<const float> row(std::size_t point) const {
    return {data_.data() + point * dim_, static_cast<std::size_t>(dim_)};
  }
  std::uint32_t count(std::size_t point) const { return counts_[point]; }
  void set_count(std::size_t point, std::uint32_t c) { counts_[point] = c; }
  bool valid(std::size_t point) const { return counts_[point] > 0; }
  std::size_t num_valid() const;

  const std::vector<float>& data() const { return data_; }
  const std::vector<std::uint32_t>& counts() const { return counts_; }

 private:
  int dim_ = 0;
  std::vector<float> data_;
  std::vector<std::uint32_t> counts_;
};

}  // namespace mvov3d

#endif  // MVOV3D_FEATURE_MAP_H_
