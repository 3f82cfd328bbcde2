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

#ifndef MVOV3D_KNN_H_
#define MVOV3D_KNN_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mvov3d {

// Static 3D kd-tree. Neighbours are ranked by squared distance (computed in
// double) and then by point index, so results are fully deterministic.
class KnnIndex {
 public:
  explicit KnnIndex(std::span<const Eigen::Vector3f> points);

  // Indices of the k nearest points to `query`, nearest first. `exclude`
  // removes one index from consideration (typically the query itself).
  std::vector<std::uint32_t> Query(
      const Eigen::Vector3f& query, std::size_t k,
      std::optional<std::uint32_t> exclude = std::nullopt) const;

  std::size_t size() const { return points_.size(); }

 private:
  struct Node {
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    int axis = -1;  // -1 marks a leaf
    float split = 0.0f;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };
  struct Candidate {
    double dist2;
    std::uint32_t index;
    bool operator<(const Candidate& other) const {
      return dist2 != other.dist2 ? dist2 < other.dist2 : index < other.index;
    }
  };

  std::int32_t Build(std::uint32_t begin, std::uint32_t end);
  void Search(std::int32_t node, const Eigen::Vector3d& query, std::size_t k,
              std::optional<std::uint32_t> exclude,
              std::vector<Candidate>& heap) const;

  std::span<const Eigen::Vector3f> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace mvov3d

#endif  // MVOV3D_KNN_H_
