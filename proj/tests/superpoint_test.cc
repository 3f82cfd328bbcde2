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
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "mvov3d/errors.h"
#include "mvov3d/knn.h"
#include "test_util.h"

namespace mvov3d::superpoint {
namespace {

using testing::Rng;

std::vector<Eigen::Vector3f> RandomPoints(Rng& rng, int n) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<Eigen::Vector3f> points;
  for (int i = 0; i < n; ++i) points.push_back({u(rng), u(rng), u(rng)});
  return points;
}

std::vector<std::uint32_t> BruteForceKnn(const std::vector<Eigen::Vector3f>& points,
                                         const Eigen::Vector3f& q, std::size_t k,
                                         std::optional<std::uint32_t> exclude) {
  std::vector<std::pair<double, std::uint32_t>> all;
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    if (exclude && *exclude == i) continue;
    const Eigen::Vector3d d = (points[i] - q).cast<double>();
    all.push_back({d.squaredNorm(), i});
  }
  std::sort(all.begin(), all.end());
  std::vector<std::uint32_t> out;
  for (std::size_t j = 0; j < std::min(k, all.size()); ++j) {
    out.push_back(all[j].second);
  }
  return out;
}

TEST(KnnIndexTest, MatchesBruteForce) {
  Rng rng(1);
  for (int n : {1, 5, 13, 100, 700}) {
    const auto points = RandomPoints(rng, n);
    const KnnIndex index(points);
    for (int q = 0; q < 30; ++q) {
      const std::uint32_t self = q % n;
      for (std::size_t k : {1u, 4u, 16u}) {
        EXPECT_EQ(index.Query(points[self], k, self),
                  BruteForceKnn(points, points[self], k, self));
        const Eigen::Vector3f off = RandomPoints(rng, 1)[0];
        EXPECT_EQ(index.Query(off, k), BruteForceKnn(points, off, k, {}));
      }
    }
  }
}

TEST(KnnIndexTest, TiesBreakByIndex) {
  // A regular grid has many equidistant neighbours.
  std::vector<Eigen::Vector3f> points;
  for (int x = 0; x < 6; ++x) {
    for (int y = 0; y < 6; ++y) {
      for (int z = 0; z < 3; ++z) points.push_back(Eigen::Vector3f(x, y, z));
    }
  }
  points.push_back(points[40]);  // exact duplicate
  const KnnIndex index(points);
  for (std::uint32_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(index.Query(points[i], 10, i),
              BruteForceKnn(points, points[i], 10, i));
  }
}

ScenePointCloud CloudOf(std::vector<Eigen::Vector3f> points) {
  ScenePointCloud cloud;
  cloud.positions = std::move(points);
  return cloud;
}

TEST(EstimateNormalsTest, SphereNormalsAreRadial) {
  Rng rng(2);
  std::normal_distribution<float> g(0.0f, 1.0f);
  std::vector<Eigen::Vector3f> points;
  for (int i = 0; i < 2000; ++i) {
    points.push_back(Eigen::Vector3f(g(rng), g(rng), g(rng)).normalized());
  }
  const auto estimate = EstimateNormals(CloudOf(points), 16);
  EXPECT_EQ(estimate.num_degenerate, 0u);
  const double max_angle = 5.0 * std::numbers::pi / 180.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double c = std::abs(estimate.normals[i].dot(points[i]));
    EXPECT_GE(c, std::cos(max_angle)) << "point " << i;
    EXPECT_NEAR(estimate.normals[i].norm(), 1.0, 1e-5);
  }
}

TEST(EstimateNormalsTest, SignsFollowUpThenYThenX) {
  Rng rng(3);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<Eigen::Vector3f> horizontal, xz_plane, yz_plane;
  for (int i = 0; i < 200; ++i) {
    horizontal.push_back({u(rng), u(rng), 0.3f});
    xz_plane.push_back({u(rng), -0.2f, u(rng)});
    yz_plane.push_back({0.7f, u(rng), u(rng)});
  }
  for (const auto& n : EstimateNormals(CloudOf(horizontal), 10).normals) {
    EXPECT_NEAR(n.z(), 1.0f, 1e-5);
  }
  for (const auto& n : EstimateNormals(CloudOf(xz_plane), 10).normals) {
    EXPECT_NEAR(n.y(), 1.0f, 1e-5);
  }
  for (const auto& n : EstimateNormals(CloudOf(yz_plane), 10).normals) {
    EXPECT_NEAR(n.x(), 1.0f, 1e-5);
  }
}

TEST(EstimateNormalsTest, CollinearPointsFallBackToUp) {
  std::vector<Eigen::Vector3f> line;
  for (int i = 0; i < 30; ++i) line.push_back({0.1f * i, 0.05f * i, 0.0f});
  const auto estimate = EstimateNormals(CloudOf(line), 8);
  EXPECT_EQ(estimate.num_degenerate, line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    EXPECT_EQ(estimate.degenerate[i], 1);
    EXPECT_EQ(estimate.normals[i], Eigen::Vector3f::UnitZ());
  }
}

TEST(EstimateNormalsTest, RejectsTooFewPoints) {
  EXPECT_THROW(EstimateNormals(CloudOf({{0, 0, 0}, {1, 0, 0}}), 3), ConfigError);
  Rng rng(1);
  EXPECT_THROW(EstimateNormals(CloudOf(RandomPoints(rng, 10)), 2), ConfigError);
}

TEST(EstimateNormalsTest, ThreadCountDoesNotChangeResult) {
  Rng rng(4);
  const auto cloud = CloudOf(RandomPoints(rng, 500));
  const auto a = EstimateNormals(cloud, 12, 1);
  const auto b = EstimateNormals(cloud, 12, 4);
  EXPECT_EQ(a.normals, b.normals);
  EXPECT_EQ(a.degenerate, b.degenerate);
}

TEST(BuildAdjacencyGraphTest, MatchesSymmetricKnnOracle) {
  Rng rng(5);
  auto cloud = CloudOf(RandomPoints(rng, 150));
  for (int i = 0; i < 150; ++i) {
    cloud.normals.push_back(RandomPoints(rng, 1)[0].normalized());
  }
  for (bool absolute : {false, true}) {
    const int k = 6;
    std::set<std::pair<std::uint32_t, std::uint32_t>> expected;
    for (std::uint32_t i = 0; i < 150; ++i) {
      for (std::uint32_t j :
           BruteForceKnn(cloud.positions, cloud.positions[i], k, i)) {
        expected.insert({std::min(i, j), std::max(i, j)});
      }
    }
    const auto graph = BuildAdjacencyGraph(cloud, k, absolute);
    EXPECT_EQ(graph.num_nodes, 150u);
    ASSERT_EQ(graph.edges.size(), expected.size());
    auto it = expected.begin();
    for (const Edge& e : graph.edges) {
      EXPECT_EQ(e.a, it->first);
      EXPECT_EQ(e.b, it->second);
      const double dot = cloud.normals[e.a].cast<double>().dot(
          cloud.normals[e.b].cast<double>());
      EXPECT_NEAR(e.weight, absolute ? 1.0 - std::abs(dot) : 1.0 - dot, 1e-6);
      EXPECT_GE(e.weight, 0.0);
      EXPECT_LE(e.weight, 2.0);
      ++it;
    }
  }
}

TEST(BuildAdjacencyGraphTest, RejectsBadInputs) {
  Rng rng(6);
  auto cloud = CloudOf(RandomPoints(rng, 10));
  EXPECT_THROW(BuildAdjacencyGraph(cloud, 3), ConfigError);  // no normals
  cloud.normals.assign(10, Eigen::Vector3f::UnitZ());
  EXPECT_THROW(BuildAdjacencyGraph(cloud, 0), ConfigError);
  EXPECT_THROW(BuildAdjacencyGraph(cloud, 10), ConfigError);
}

PointAdjacencyGraph HandGraph() {
  PointAdjacencyGraph g;
  g.num_nodes = 8;
  g.edges = {{0, 1, 0.0}, {0, 7, 1.0},  {1, 2, 0.0}, {2, 3, 0.0},
             {3, 4, 0.9}, {4, 5, 0.0},  {5, 6, 0.05}, {6, 7, 0.0}};
  return g;
}

TEST(SegmentGraphTest, HandTracedEightNodes) {
  // Zero-weight edges join {0..3}, {4,5}, {6,7}; (5,6) at 0.05 meets the
  // threshold 0 + 0.1/2 exactly and joins; (3,4) at 0.9 exceeds 0.1/4.
  const auto p = SegmentGraph(HandGraph(), 0.1, 1);
  EXPECT_EQ(p.labels, (std::vector<std::int32_t>{0, 0, 0, 0, 1, 1, 1, 1}));
  EXPECT_EQ(p.sizes, (std::vector<std::size_t>{4, 4}));

  // With k = 0 only zero-weight edges pass.
  const auto strict = SegmentGraph(HandGraph(), 0.0, 1);
  EXPECT_EQ(strict.labels, (std::vector<std::int32_t>{0, 0, 0, 0, 1, 1, 2, 2}));

  // A minimum size of 5 forces the lightest crossing edge (3,4).
  const auto merged = SegmentGraph(HandGraph(), 0.1, 5);
  EXPECT_EQ(merged.num_segments(), 1u);
  EXPECT_EQ(merged.sizes[0], 8u);

  // The minimum-size pass on the strict result: {4,5} and {6,7} are joined
  // by (5,6), reaching size 4, after which nothing is below the minimum.
  const auto strict_min = SegmentGraph(HandGraph(), 0.0, 3);
  EXPECT_EQ(strict_min.num_segments(), 2u);
  EXPECT_EQ(strict_min.labels,
            (std::vector<std::int32_t>{0, 0, 0, 0, 1, 1, 1, 1}));
}

// Naive reference with explicit relabelling.
std::vector<int> OracleSegment(const PointAdjacencyGraph& g, double k,
                               std::size_t min_size) {
  const std::size_t n = g.num_nodes;
  std::vector<int> comp(n);
  for (std::size_t i = 0; i < n; ++i) comp[i] = static_cast<int>(i);
  std::vector<double> internal(n, 0.0);
  std::vector<std::size_t> size(n, 1);
  auto edges = g.edges;
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.weight, x.a, x.b) < std::tie(y.weight, y.a, y.b);
  });
  auto join = [&](int a, int b, double w) {
    for (auto& c : comp) {
      if (c == b) c = a;
    }
    size[a] += size[b];
    internal[a] = std::max({internal[a], internal[b], w});
  };
  for (const Edge& e : edges) {
    const int a = comp[e.a], b = comp[e.b];
    if (a == b) continue;
    const double ta = internal[a] + k / size[a];
    const double tb = internal[b] + k / size[b];
    if (e.weight <= std::min(ta, tb)) join(a, b, e.weight);
  }
  for (const Edge& e : edges) {
    const int a = comp[e.a], b = comp[e.b];
    if (a == b) continue;
    if (size[a] < min_size || size[b] < min_size) join(a, b, e.weight);
  }
  return comp;
}

// True if two labelings induce the same partition.
bool SamePartition(const std::vector<int>& x, const std::vector<std::int32_t>& y) {
  std::map<int, std::int32_t> fwd;
  std::map<std::int32_t, int> back;
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto [f, fnew] = fwd.emplace(x[i], y[i]);
    auto [b, bnew] = back.emplace(y[i], x[i]);
    if (f->second != y[i] || b->second != x[i]) return false;
  }
  return true;
}

PointAdjacencyGraph RandomGraph(Rng& rng, std::size_t n, int edges) {
  std::uniform_int_distribution<std::uint32_t> node(0, n - 1);
  std::uniform_int_distribution<int> level(0, 8);
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  PointAdjacencyGraph g;
  g.num_nodes = n;
  for (int e = 0; e < edges; ++e) {
    std::uint32_t a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!seen.insert({a, b}).second) continue;
    // Quantized weights produce many ties.
    g.edges.push_back({a, b, 0.125 * level(rng)});
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const Edge& x, const Edge& y) {
              return std::tie(x.a, x.b) < std::tie(y.a, y.b);
            });
  return g;
}

TEST(SegmentGraphTest, MatchesNaiveOracleOnRandomGraphs) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + trial % 40;
    const auto g = RandomGraph(rng, n, static_cast<int>(2 * n));
    const double k = 0.05 * (trial % 7);
    const std::size_t min_size = trial % 6;
    const auto p = SegmentGraph(g, k, min_size);
    ASSERT_TRUE(SamePartition(OracleSegment(g, k, min_size), p.labels))
        << "trial " << trial;
  }
}

std::vector<std::size_t> ComponentSizes(const PointAdjacencyGraph& g,
                                        std::vector<int>* comp_of) {
  const auto comp = OracleSegment(g, 1e9, 0);  // everything connected merges
  *comp_of = comp;
  std::map<int, std::size_t> sizes;
  for (int c : comp) ++sizes[c];
  std::vector<std::size_t> per_node;
  for (int c : comp) per_node.push_back(sizes[c]);
  return per_node;
}

TEST(SegmentGraphTest, PartitionInvariants) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + trial;
    const auto g = RandomGraph(rng, n, static_cast<int>(n + trial % 30));
    const std::size_t min_size = 1 + trial % 7;
    const auto p = SegmentGraph(g, 0.1, min_size);
    ASSERT_EQ(p.labels.size(), n);
    EXPECT_LE(p.num_segments(), n);
    // Labels are contiguous, first appearances in ascending order.
    std::int32_t next = 0;
    std::vector<std::size_t> counted(p.num_segments(), 0);
    for (std::int32_t l : p.labels) {
      ASSERT_GE(l, 0);
      ASSERT_LE(l, next);
      if (l == next) ++next;
      ++counted[l];
    }
    EXPECT_EQ(counted, p.sizes);
    std::vector<int> comp;
    const auto component_size = ComponentSizes(g, &comp);
    for (std::size_t i = 0; i < n; ++i) {
      // Small segments only survive inside small connected components.
      if (p.sizes[p.labels[i]] < min_size) {
        EXPECT_EQ(p.sizes[p.labels[i]], component_size[i]);
      }
    }
  }
}

TEST(SegmentGraphTest, IsDeterministic) {
  Rng rng(9);
  const auto g = RandomGraph(rng, 60, 200);
  const auto a = SegmentGraph(g, 0.2, 3);
  const auto b = SegmentGraph(g, 0.2, 3);
  EXPECT_EQ(a.labels, b.labels);
}

TEST(PoolSuperpointsTest, MatchesOracleAndSkipsInvalidMembers) {
  Rng rng(10);
  std::uniform_int_distribution<int> seg(0, 9);
  std::bernoulli_distribution valid(0.7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 80;
    const int dim = 5;
    SuperpointPartition partition;
    std::vector<int> raw(m);
    for (auto& r : raw) r = seg(rng);
    std::map<int, std::int32_t> relabel;
    for (int r : raw) {
      if (relabel.emplace(r, static_cast<std::int32_t>(relabel.size())).second) {
        partition.sizes.push_back(0);
      }
    }
    for (int r : raw) {
      partition.labels.push_back(relabel[r]);
      ++partition.sizes[relabel[r]];
    }
    PointFeatureField field(m, dim);
    for (std::size_t i = 0; i < m; ++i) {
      const auto v = testing::RandomVector(rng, dim);
      std::copy(v.begin(), v.end(), field.row(i).begin());
      field.set_count(i, valid(rng) ? 1 + i % 3 : 0);
    }
    const auto pooled = PoolSuperpoints(field, partition);
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> mean(dim, 0.0);
      int members = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (partition.labels[j] != partition.labels[i] || !field.valid(j)) continue;
        for (int k = 0; k < dim; ++k) mean[k] += field.row(j)[k];
        ++members;
      }
      ASSERT_EQ(pooled.count(i), static_cast<std::uint32_t>(members));
      for (int k = 0; k < dim; ++k) {
        EXPECT_NEAR(pooled.row(i)[k], members ? mean[k] / members : 0.0, 1e-6);
      }
    }
    // Pooling twice leaves features and validity unchanged.
    const auto twice = PoolSuperpoints(pooled, partition);
    for (std::size_t i = 0; i < m; ++i) {
      EXPECT_EQ(twice.valid(i), pooled.valid(i));
      for (int k = 0; k < dim; ++k) {
        EXPECT_NEAR(twice.row(i)[k], pooled.row(i)[k], 1e-6);
      }
    }
  }
}

TEST(PoolSuperpointsTest, SizeMismatchIsConfigError) {
  SuperpointPartition partition{{0, 0, 1}, {2, 1}};
  EXPECT_THROW(PoolSuperpoints(PointFeatureField(4, 2), partition), ConfigError);
}

ScenePointCloud TwoOrthogonalPlanes(Rng& rng, int per_plane) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  ScenePointCloud cloud;
  for (int i = 0; i < per_plane; ++i) {
    cloud.positions.push_back({u(rng), u(rng), 0.0f});
    cloud.normals.push_back(Eigen::Vector3f::UnitZ());
    cloud.labels.push_back(0);
  }
  for (int i = 0; i < per_plane; ++i) {
    cloud.positions.push_back({u(rng), 0.0f, 0.02f + u(rng)});
    cloud.normals.push_back(Eigen::Vector3f::UnitY());
    cloud.labels.push_back(1);
  }
  return cloud;
}

TEST(ComputeSuperpointsTest, SeparatesOrthogonalPlanes) {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const auto cloud = TwoOrthogonalPlanes(rng, 100);
    const auto p = ComputeSuperpoints(cloud, SuperpointConfig{});
    ASSERT_EQ(p.num_segments(), 2u);
    int wrong = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      wrong += p.labels[i] != cloud.labels[i];
    }
    EXPECT_LE(wrong, 4);
  }
}

TEST(ComputeSuperpointsTest, EstimatesNormalsWhenMissing) {
  Rng rng(12);
  auto cloud = TwoOrthogonalPlanes(rng, 150);
  cloud.normals.clear();
  const auto p = ComputeSuperpoints(cloud, SuperpointConfig{});
  EXPECT_GE(p.num_segments(), 2u);
  EXPECT_LE(p.num_segments(), cloud.size());
}

TEST(ComputeSuperpointsTest, RejectsCloudNotLargerThanK) {
  Rng rng(13);
  auto cloud = TwoOrthogonalPlanes(rng, 8);
  EXPECT_THROW(ComputeSuperpoints(cloud, SuperpointConfig{}), ConfigError);
}

}  // namespace
}  // namespace mvov3d::superpoint
