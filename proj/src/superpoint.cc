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

#include "mvov3d/superpoint.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "mvov3d/errors.h"
#include "mvov3d/knn.h"
#include "mvov3d/parallel.h"

namespace mvov3d::superpoint {
namespace {

// Relative eigenvalue floor below which a neighbourhood counts as rank < 2.
constexpr double kRankTolerance = 1e-10;

Eigen::Vector3d OrientNormal(Eigen::Vector3d n) {
  constexpr double kEps = 1e-9;
  for (int axis : {2, 1, 0}) {
    if (std::abs(n[axis]) > kEps) {
      return n[axis] < 0.0 ? Eigen::Vector3d(-n) : n;
    }
  }
  return n;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1), internal_(n) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }

  std::uint32_t Find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Joins two roots; returns the new root. The joining edge becomes the
  // largest internal weight since edges arrive in ascending order.
  std::uint32_t Join(std::uint32_t a, std::uint32_t b, double weight) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    internal_[a] = weight;
    return a;
  }

  std::size_t Size(std::uint32_t root) const { return size_[root]; }
  double Internal(std::uint32_t root) const { return internal_[root]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<double> internal_;
};

}  // namespace

NormalEstimate EstimateNormals(const ScenePointCloud& cloud, int k,
                               unsigned threads) {
  const std::size_t m = cloud.size();
  if (k < 3 || static_cast<std::size_t>(k) > m) {
    throw ConfigError("normal estimation needs M >= k >= 3 (M = " +
                      std::to_string(m) + ", k = " + std::to_string(k) + ")");
  }
  const KnnIndex index(cloud.positions);
  NormalEstimate result;
  result.normals.resize(m);
  result.degenerate.assign(m, 0);
  ParallelFor(m, threads, [&](std::size_t i) {
    const auto neighbours = index.Query(cloud.positions[i], k);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (std::uint32_t j : neighbours) mean += cloud.positions[j].cast<double>();
    mean /= static_cast<double>(neighbours.size());
    Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
    for (std::uint32_t j : neighbours) {
      const Eigen::Vector3d d = cloud.positions[j].cast<double>() - mean;
      covariance += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(covariance);
    const Eigen::Vector3d eigenvalues = solver.eigenvalues();  // ascending
    if (!(eigenvalues[2] > 0.0) ||
        eigenvalues[1] <= kRankTolerance * eigenvalues[2]) {
      result.normals[i] = Eigen::Vector3f::UnitZ();
      result.degenerate[i] = 1;
      return;
    }
    const Eigen::Vector3d normal =
        OrientNormal(solver.eigenvectors().col(0).normalized());
    result.normals[i] = normal.cast<float>();
  });
  result.num_degenerate = static_cast<std::size_t>(
      std::count(result.degenerate.begin(), result.degenerate.end(), 1));
  return result;
}

PointAdjacencyGraph BuildAdjacencyGraph(const ScenePointCloud& cloud, int k,
                                        bool absolute_cosine,
                                        unsigned threads) {
  const std::size_t m = cloud.size();
  if (!cloud.has_normals()) {
    throw ConfigError("adjacency graph needs point normals");
  }
  if (k < 1 || static_cast<std::size_t>(k) >= m) {
    throw ConfigError("k-NN graph needs 1 <= k < M (M = " + std::to_string(m) +
                      ", k = " + std::to_string(k) + ")");
  }
  const KnnIndex index(cloud.positions);
  std::vector<std::vector<std::uint32_t>> neighbours(m);
  ParallelFor(m, threads, [&](std::size_t i) {
    neighbours[i] = index.Query(cloud.positions[i], k,
                                static_cast<std::uint32_t>(i));
  });

  PointAdjacencyGraph graph;
  graph.num_nodes = m;
  graph.edges.reserve(m * k);
  for (std::uint32_t i = 0; i < m; ++i) {
    for (std::uint32_t j : neighbours[i]) {
      graph.edges.push_back({std::min(i, j), std::max(i, j), 0.0});
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end(),
            [](const Edge& x, const Edge& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end(),
                                [](const Edge& x, const Edge& y) {
                                  return x.a == y.a && x.b == y.b;
                                }),
                    graph.edges.end());
  for (Edge& edge : graph.edges) {
    double cosine = cloud.normals[edge.a].cast<double>().dot(
        cloud.normals[edge.b].cast<double>());
    if (absolute_cosine) cosine = std::abs(cosine);
    edge.weight = std::clamp(1.0 - cosine, 0.0, 2.0);
  }
  return graph;
}

SuperpointPartition SegmentGraph(const PointAdjacencyGraph& graph,
                                 double k_param, std::size_t min_size) {
  std::vector<Edge> edges = graph.edges;
  for (const Edge& e : edges) {
    if (e.a >= graph.num_nodes || e.b >= graph.num_nodes) {
      throw ConfigError("edge references a node outside the graph");
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
  });

  DisjointSets sets(graph.num_nodes);
  auto threshold = [&](std::uint32_t root) {
    return sets.Internal(root) +
           k_param / static_cast<double>(sets.Size(root));
  };
  for (const Edge& e : edges) {
    const std::uint32_t a = sets.Find(e.a);
    const std::uint32_t b = sets.Find(e.b);
    if (a == b) continue;
    if (e.weight <= std::min(threshold(a), threshold(b))) {
      sets.Join(a, b, e.weight);
    }
  }
  for (const Edge& e : edges) {
    const std::uint32_t a = sets.Find(e.a);
    const std::uint32_t b = sets.Find(e.b);
    if (a == b) continue;
    if (sets.Size(a) < min_size || sets.Size(b) < min_size) {
      sets.Join(a, b, e.weight);
    }
  }

  SuperpointPartition partition;
  partition.labels.assign(graph.num_nodes, -1);
  std::vector<std::int32_t> root_label(graph.num_nodes, -1);
  for (std::uint32_t i = 0; i < graph.num_nodes; ++i) {
    const std::uint32_t root = sets.Find(i);
    if (root_label[root] < 0) {
      root_label[root] = static_cast<std::int32_t>(partition.sizes.size());
      partition.sizes.push_back(0);
    }
    partition.labels[i] = root_label[root];
    ++partition.sizes[root_label[root]];
  }
  return partition;
}

PointFeatureField PoolSuperpoints(const PointFeatureField& features,
                                  const SuperpointPartition& partition) {
  const std::size_t m = features.num_points();
  if (partition.labels.size() != m) {
    throw ConfigError("partition covers " +
                      std::to_string(partition.labels.size()) +
                      " points, feature field has " + std::to_string(m));
  }
  const std::size_t q = partition.num_segments();
  const int dim = features.dim();
  std::vector<double> sums(q * dim, 0.0);
  std::vector<std::uint32_t> valid_members(q, 0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::int32_t label = partition.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= q) {
      throw ConfigError("superpoint label " + std::to_string(label) +
                        " out of range");
    }
    if (!features.valid(i)) continue;
    const auto row = features.row(i);
    double* sum = sums.data() + static_cast<std::size_t>(label) * dim;
    for (int k = 0; k < dim; ++k) sum[k] += row[k];
    ++valid_members[label];
  }
  std::vector<float> means(q * dim, 0.0f);
  for (std::size_t s = 0; s < q; ++s) {
    if (valid_members[s] == 0) continue;
    for (int k = 0; k < dim; ++k) {
      means[s * dim + k] =
          static_cast<float>(sums[s * dim + k] / valid_members[s]);
    }
  }
  PointFeatureField out(m, dim);
  for (std::size_t i = 0; i < m; ++i) {
    const auto label = static_cast<std::size_t>(partition.labels[i]);
    if (valid_members[label] == 0) continue;
    std::copy_n(means.data() + label * dim, dim, out.row(i).begin());
    out.set_count(i, valid_members[label]);
  }
  return out;
}

SuperpointPartition ComputeSuperpoints(const ScenePointCloud& cloud,
                                       const SuperpointConfig& config,
                                       unsigned threads) {
  const std::size_t m = cloud.size();
  if (config.knn < 3) throw ConfigError("superpoint k-NN must be >= 3");
  if (m <= static_cast<std::size_t>(config.knn)) {
    throw ConfigError("superpoints need more than " +
                      std::to_string(config.knn) + " points, got " +
                      std::to_string(m));
  }
  if (cloud.has_normals()) {
    const auto graph =
        BuildAdjacencyGraph(cloud, config.knn, config.absolute_cosine, threads);
    return SegmentGraph(graph, config.k_param, config.min_size);
  }
  ScenePointCloud with_normals = cloud;
  with_normals.normals = EstimateNormals(cloud, config.knn, threads).normals;
  const auto graph = BuildAdjacencyGraph(with_normals, config.knn,
                                         config.absolute_cosine, threads);
  return SegmentGraph(graph, config.k_param, config.min_size);
}

}  // namespace mvov3d::superpoint
