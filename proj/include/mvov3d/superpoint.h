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

#ifndef MVOV3D_SUPERPOINT_H_
#define MVOV3D_SUPERPOINT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mvov3d/feature_map.h"
#include "mvov3d/scene.h"

namespace mvov3d::superpoint {

struct NormalEstimate {
  std::vector<Eigen::Vector3f> normals;
  // 1 where the neighbourhood had rank < 2 and the up-vector was used.
  std::vector<std::uint8_t> degenerate;
  std::size_t num_degenerate = 0;
};

// PCA normals: the smallest-eigenvalue eigenvector of the covariance of the
// k nearest points (the point itself included). Signs are fixed so the
// normal points towards +z, falling back to +y and then +x when the
// component is zero. Requires M >= k >= 3, else ConfigError.
NormalEstimate EstimateNormals(const ScenePointCloud& cloud, int k,
                               unsigned threads = 1);

struct Edge {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  double weight = 0.0;  // 1 - n_a . n_b, in [0, 2]
};

struct PointAdjacencyGraph {
  std::size_t num_nodes = 0;
  // Undirected, deduplicated, sorted by (a, b).
  std::vector<Edge> edges;
};

// Symmetric k-NN graph: (i, j) is an edge if either point has the other
// among its k nearest neighbours. With `absolute_cosine` the weight is
// 1 - |n_i . n_j| instead. Throws ConfigError if normals are missing,
// k < 1, or k >= M.
PointAdjacencyGraph BuildAdjacencyGraph(const ScenePointCloud& cloud, int k,
                                        bool absolute_cosine = false,
                                        unsigned threads = 1);

struct SuperpointPartition {
  // Segment label of every point, contiguous from 0 in order of the first
  // point of each segment.
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> sizes;

  std::size_t num_segments() const { return sizes.size(); }
};

// Greedy graph segmentation. Edges are taken in ascending (weight, a, b)
// order; two components merge when the edge weight does not exceed
// min(Int(A) + k_param / |A|, Int(B) + k_param / |B|), Int being the largest
// edge weight inside a component. A second pass over the same order merges
// every component smaller than `min_size` across its first (lightest)
// connecting edge. Components with no outgoing edge keep their size.
SuperpointPartition SegmentGraph(const PointAdjacencyGraph& graph,
                                 double k_param, std::size_t min_size);

// Replaces each point's feature with the mean of the valid features inside
// its superpoint. Every member of a superpoint with at least one valid
// point becomes valid with count equal to the number of valid members;
// superpoints without valid members stay invalid.
// Throws ConfigError when the partition does not cover the field.
PointFeatureField PoolSuperpoints(const PointFeatureField& features,
                                  const SuperpointPartition& partition);

struct SuperpointConfig {
  bool enabled = true;
  int knn = 16;
  double k_param = 0.1;
  std::size_t min_size = 20;
  bool absolute_cosine = false;
};

// Normals (estimated when the cloud has none), graph and segmentation.
SuperpointPartition ComputeSuperpoints(const ScenePointCloud& cloud,
                                       const SuperpointConfig& config,
                                       unsigned threads = 1);

}  // namespace mvov3d::superpoint

#endif  // MVOV3D_SUPERPOINT_H_
