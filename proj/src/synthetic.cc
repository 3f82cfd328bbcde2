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

#include "mvov3d/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <Eigen/QR>

#include "mvov3d/errors.h"
#include "mvov3d/fusion.h"
#include "mvov3d/geometry.h"

namespace mvov3d::synthetic {
namespace {

constexpr std::array<const char*, 20> kClassNames = {
    "wall",    "chair",  "table",  "lamp",     "sofa",  "bed",  "cabinet",
    "door",    "window", "shelf",  "picture",  "desk",  "sink", "toilet",
    "curtain", "pillow", "mirror", "monitor",  "clock", "plant"};

std::string ClassName(int index) {
  if (index < static_cast<int>(kClassNames.size())) return kClassNames[index];
  return "class_" + std::to_string(index);
}

double Deg(double degrees) { return degrees * std::numbers::pi / 180.0; }

void CheckSpec(const SyntheticSpec& spec) {
  if (spec.planes < 1 || spec.points_per_plane < 1 || spec.views < 1 ||
      spec.occluders < 0 || spec.feature_dim < 1 || spec.width < 2 ||
      spec.height < 2 || spec.distractors < 0) {
    throw ConfigError("malformed synthetic scene spec");
  }
  if (!(spec.noise_sigma >= 0.0)) {
    throw ConfigError("noise sigma must be non-negative");
  }
  if (spec.planes + spec.occluders > spec.feature_dim) {
    throw ConfigError("orthonormal class embeddings need feature_dim >= " +
                      std::to_string(spec.planes + spec.occluders));
  }
}

// Rows are orthonormal class embeddings.
std::vector<float> OrthonormalEmbeddings(int count, int dim,
                                         std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd gaussian(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) gaussian(r, c) = normal(rng);
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian)
                                .householderQ() *
                            Eigen::MatrixXd::Identity(dim, dim);
  std::vector<float> out(static_cast<std::size_t>(count) * dim);
  for (int l = 0; l < count; ++l) {
    for (int k = 0; k < dim; ++k) out[l * dim + k] = static_cast<float>(q(k, l));
  }
  return out;
}

}  // namespace

std::optional<double> Panel::Intersect(const Eigen::Vector3d& origin,
                                       const Eigen::Vector3d& direction) const {
  const Eigen::Vector3d n = normal();
  const double denom = direction.dot(n);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (center - origin).dot(n) / denom;
  if (!(t > 0.0)) return std::nullopt;
  const Eigen::Vector3d local = origin + t * direction - center;
  if (std::abs(local.dot(right)) > half_width ||
      std::abs(local.dot(up)) > half_height) {
    return std::nullopt;
  }
  return t;
}

SyntheticLayout DefaultLayout(const SyntheticSpec& spec, std::uint64_t seed) {
  CheckSpec(spec);
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ull);
  std::uniform_real_distribution<double> jitter(-1.0, 1.0);
  constexpr double kSpacing = 1.1;
  SyntheticLayout layout;
  const double half_row = 0.5 * (spec.planes - 1) * kSpacing;
  for (int k = 0; k < spec.planes; ++k) {
    const double base =
        spec.planes == 1 ? 0.0 : -30.0 + 60.0 * k / (spec.planes - 1);
    const double angle = Deg(base + 5.0 * jitter(rng));
    Panel panel;
    panel.center = {k * kSpacing - half_row, 0.1 * jitter(rng), 0.5};
    panel.right = {std::cos(angle), std::sin(angle), 0.0};
    panel.up = Eigen::Vector3d::UnitZ();
    layout.panels.push_back(panel);
  }
  for (int o = 0; o < spec.occluders; ++o) {
    Panel panel;
    const Panel& behind = layout.panels[o % spec.planes];
    panel.center = {behind.center.x() + 0.3 * jitter(rng), -1.4,
                    0.45 + 0.1 * jitter(rng)};
    panel.half_width = 0.22;
    panel.half_height = 0.22;
    layout.panels.push_back(panel);
  }
  for (int v = 0; v < spec.views; ++v) {
    const double t = spec.views == 1 ? 0.5 : static_cast<double>(v) /
                                                 (spec.views - 1);
    CameraPose pose;
    pose.eye = {(2.0 * t - 1.0) * (half_row + 0.3), -3.2 + 0.2 * jitter(rng),
                0.7 + 0.2 * jitter(rng)};
    pose.target = {0.6 * pose.eye.x(), 0.0, 0.5};
    layout.cameras.push_back(pose);
  }
  return layout;
}

Eigen::Matrix3d SyntheticIntrinsics(const SyntheticSpec& spec) {
  Eigen::Matrix3d k = Eigen::Matrix3d::Identity();
  k(0, 0) = 0.9 * spec.width;
  k(1, 1) = 0.9 * spec.width;
  k(0, 2) = 0.5 * spec.width;
  k(1, 2) = 0.5 * spec.height;
  return k;
}

Rendering Render(const SyntheticLayout& layout, const CameraModel& camera) {
  const int h = camera.height(), w = camera.width();
  const Eigen::Matrix3d rotation = camera.extrinsics().topLeftCorner<3, 3>();
  const Eigen::Vector3d origin =
      -rotation.transpose() * camera.extrinsics().topRightCorner<3, 1>();
  std::vector<float> depth(static_cast<std::size_t>(h) * w, 0.0f);
  std::vector<std::int32_t> instance(depth.size(), -1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      // Camera-space ray with unit z, so the ray parameter is the depth.
      const Eigen::Vector3d ray((c - camera.cx()) / camera.fx(),
                                (r - camera.cy()) / camera.fy(), 1.0);
      const Eigen::Vector3d direction = rotation.transpose() * ray;
      double nearest = std::numeric_limits<double>::infinity();
      std::int32_t hit = -1;
      for (std::size_t p = 0; p < layout.panels.size(); ++p) {
        const auto t = layout.panels[p].Intersect(origin, direction);
        if (t && *t < nearest) {
          nearest = *t;
          hit = static_cast<std::int32_t>(p);
        }
      }
      if (hit >= 0) {
        depth[static_cast<std::size_t>(r) * w + c] = static_cast<float>(nearest);
        instance[static_cast<std::size_t>(r) * w + c] = hit;
      }
    }
  }
  return {DepthMap(h, w, std::move(depth)), std::move(instance)};
}

io::Scene BuildSyntheticScene(const SyntheticLayout& layout,
                              const SyntheticSpec& spec, std::uint64_t seed) {
  CheckSpec(spec);
  const int num_classes = static_cast<int>(layout.panels.size());
  const int dim = spec.feature_dim;
  if (num_classes > dim) {
    throw ConfigError("layout has more panels than feature dimensions");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  io::Scene scene;
  scene.scene_id = "synthetic_" + std::to_string(seed);
  scene.feature_dim = dim;

  const std::vector<float> class_embeddings =
      OrthonormalEmbeddings(num_classes, dim, rng);
  std::vector<std::string> names;
  for (int l = 0; l < num_classes; ++l) names.push_back(ClassName(l));
  eval::BucketMap buckets;
  for (int l = 0; l < num_classes; ++l) {
    const int third = (3 * l) / num_classes;
    buckets[l] = third == 0   ? eval::Bucket::kHead
                 : third == 1 ? eval::Bucket::kCommon
                              : eval::Bucket::kTail;
  }
  scene.labels.emplace(names, dim, class_embeddings, buckets, -1);

  ScenePointCloud& cloud = scene.cloud;
  for (int p = 0; p < num_classes; ++p) {
    const Panel& panel = layout.panels[p];
    const Eigen::Vector3f normal_f = panel.normal().normalized().cast<float>();
    for (int i = 0; i < spec.points_per_plane; ++i) {
      const double u = (2.0 * unit(rng) - 1.0) * panel.half_width;
      const double v = (2.0 * unit(rng) - 1.0) * panel.half_height;
      cloud.positions.push_back(
          (panel.center + u * panel.right + v * panel.up).cast<float>());
      cloud.normals.push_back(normal_f);
      cloud.labels.push_back(p);
      cloud.instances.push_back(p);
    }
  }

  const Eigen::Matrix3d intrinsics = SyntheticIntrinsics(spec);
  const double region_sigma = spec.region_noise_sigma < 0.0
                                  ? 0.5 * spec.noise_sigma
                                  : spec.region_noise_sigma;
  auto class_row = [&](int l) {
    return std::span<const float>(class_embeddings.data() + l * dim,
                                  static_cast<std::size_t>(dim));
  };

  for (std::size_t v = 0; v < layout.cameras.size(); ++v) {
    const CameraPose& pose = layout.cameras[v];
    ViewBundle view;
    char id[32];
    std::snprintf(id, sizeof(id), "view_%03zu", v);
    view.image_id = id;
    view.camera = CameraModel::Create(
        intrinsics, LookAt(pose.eye, pose.target, Eigen::Vector3d::UnitZ()),
        spec.width, spec.height);
    Rendering rendering = Render(layout, view.camera);
    view.depth = std::move(rendering.depth);

    std::vector<double> pixel_sigma(num_classes, spec.noise_sigma);
    if (spec.occlusion_noise) {
      const auto hits = geometry::BuildPointPixelMap(
          cloud, view.camera, view.depth, spec.depth_tolerance);
      const auto fractions = fusion::InstanceVisibilityFractions(cloud, hits);
      for (int p = 0; p < num_classes; ++p) {
        pixel_sigma[p] = spec.noise_sigma * (1.0 - fractions.at(p));
      }
    }

    const std::size_t pixels = static_cast<std::size_t>(spec.height) * spec.width;
    std::vector<float> features(pixels * dim);
    for (std::size_t px = 0; px < pixels; ++px) {
      const std::int32_t inst = rendering.instance[px];
      float* f = features.data() + px * dim;
      if (inst < 0) {
        for (int k = 0; k < dim; ++k) {
          f[k] = static_cast<float>(normal(rng) / std::sqrt(dim));
        }
        continue;
      }
      const auto e = class_row(inst);
      for (int k = 0; k < dim; ++k) {
        f[k] = static_cast<float>(e[k] + pixel_sigma[inst] * normal(rng));
      }
    }
    view.features =
        DenseFeatureMap(spec.height, spec.width, dim, std::move(features));

    for (int p = 0; p < num_classes; ++p) {
      std::vector<std::uint8_t> mask(pixels, 0);
      std::size_t area = 0;
      for (std::size_t px = 0; px < pixels; ++px) {
        if (rendering.instance[px] == p) {
          mask[px] = 1;
          ++area;
        }
      }
      if (area == 0) continue;
      const auto e = class_row(p);
      std::vector<float> embedding(dim);
      for (int k = 0; k < dim; ++k) {
        embedding[k] = static_cast<float>(e[k] + region_sigma * normal(rng));
      }
      const auto confidence = static_cast<float>(0.7 + 0.3 * unit(rng));
      view.regions.emplace_back(spec.height, spec.width, std::move(mask),
                                std::move(embedding), confidence);

      std::vector<int> others;
      for (int l = 0; l < num_classes; ++l) {
        if (l != p) others.push_back(l);
      }
      std::shuffle(others.begin(), others.end(), rng);
      others.resize(std::min<std::size_t>(others.size(), spec.distractors));
      others.push_back(p);
      std::shuffle(others.begin(), others.end(), rng);
      TextProposalSet proposals;
      for (int l : others) {
        const auto e_l = class_row(l);
        proposals.push_back({names[l], std::vector<float>(e_l.begin(), e_l.end())});
      }
      view.proposals.push_back(std::move(proposals));
    }
    scene.views.push_back(std::move(view));
  }
  return scene;
}

io::Scene GenerateSyntheticScene(std::uint64_t seed, const SyntheticSpec& spec) {
  return BuildSyntheticScene(DefaultLayout(spec, seed), spec, seed);
}

std::filesystem::path GenerateSynthetic(std::uint64_t seed,
                                        const SyntheticSpec& spec,
                                        const std::filesystem::path& directory) {
  return io::SaveScene(GenerateSyntheticScene(seed, spec), directory);
}

}  // namespace mvov3d::synthetic
