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

#ifndef MVOV3D_SCENE_IO_H_
#define MVOV3D_SCENE_IO_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mvov3d/query_eval.h"
#include "mvov3d/scene.h"

namespace mvov3d::io {

inline constexpr int kManifestVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";

// A fully loaded and validated scene.
struct Scene {
  std::string scene_id;
  int feature_dim = 0;
  ScenePointCloud cloud;
  std::vector<ViewBundle> views;
  std::optional<eval::LabelSet> labels;
};

// Reads a manifest and every file it references (paths are relative to the
// manifest's directory). Views are loaded in parallel. Every invariant of
// every loaded type is checked; failures raise LoadError naming the file.
Scene LoadScene(const std::filesystem::path& manifest, unsigned threads = 1);

// Writes `scene` into `directory` as manifest.json plus tensor files, with
// deterministic file names. Returns the manifest path.
std::filesystem::path SaveScene(const Scene& scene,
                                const std::filesystem::path& directory);

// Bucket file: a JSON object mapping label index (as a string) or label
// name to "head" / "common" / "tail". Names need `names` to resolve.
eval::BucketMap LoadBucketFile(
    const std::filesystem::path& path,
    const std::vector<std::string>* names = nullptr);

// Convenience wrappers over ReadTensor/WriteTensor for per-point data.
std::vector<std::int32_t> ReadLabels(const std::filesystem::path& path);
void WriteLabels(const std::filesystem::path& path,
                 const std::vector<std::int32_t>& labels);
PointFeatureField ReadPointFeatures(const std::filesystem::path& features,
                                    const std::filesystem::path& counts);
void WritePointFeatures(const std::filesystem::path& features,
                        const std::filesystem::path& counts,
                        const PointFeatureField& field);

}  // namespace mvov3d::io

#endif  // MVOV3D_SCENE_IO_H_
