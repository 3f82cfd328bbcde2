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

#include "mvov3d/knn.h"

#include <algorithm>
#include <numeric>

namespace mvov3d {
namespace {

constexpr std::uint32_t kLeafSize = 12;

}  // namespace

KnnIndex::KnnIndex(std::span<const Eigen::Vector3f> points) : points_(points) {
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points.empty()) {
    nodes_.reserve(2 * points.size() / kLeafSize + 1);
    Build(0, static_cast<std::uint32_t>(points.size()));
  }
}

std::int32_t KnnIndex::Build(std::uint32_t begin, std::uint32_t end) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back({begin, end});
  if (end - begin <= kLeafSize) return id;

  Eigen::Vector3f lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all coincident

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid,
                   order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });
  const float split = points_[order_[mid]][axis];
  const std::int32_t left = Build(begin, mid);
  const std::int32_t right = Build(mid, end);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KnnIndex::Search(std::int32_t node_id, const Eigen::Vector3d& query,
                      std::size_t k, std::optional<std::uint32_t> exclude,
                      std::vector<Candidate>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t index = order_[i];
      if (exclude && *exclude == index) continue;
      const Candidate candidate{
          (points_[index].cast<double>() - query).squaredNorm(), index};
      if (heap.size() < k) {
        heap.push_back(candidate);
        std::push_heap(heap.begin(), heap.end());
      } else if (candidate < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = candidate;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = query[node.axis] - static_cast<double>(node.split);
  const std::int32_t near = diff <= 0.0 ? node.left : node.right;
  const std::int32_t far = diff <= 0.0 ? node.right : node.left;
  Search(near, query, k, exclude, heap);
  if (heap.size() < k || diff * diff <= heap.front().dist2) {
    Search(far, query, k, exclude, heap);
  }
}

std::vector<std::uint32_t> KnnIndex::Query(
    const Eigen::Vector3f& query, std::size_t k,
    std::optional<std::uint32_t> exclude) const {
  std::vector<Candidate> heap;
  if (k == 0 || nodes_.empty()) return {};
  heap.reserve(k + 1);
  Search(0, query.cast<double>(), k, exclude, heap);
  std::sort_heap(heap.begin(), heap.end());
  std::vector<std::uint32_t> result;
  result.reserve(heap.size());
  for (const Candidate& c : heap) result.push_back(c.index);
  return result;
}

}  // namespace mvov3d
