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

#include "mvov3d/scene_io.h"

#include <cstdio>
#include <fstream>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "mvov3d/errors.h"
#include "mvov3d/parallel.h"
#include "mvov3d/tensor_io.h"

namespace mvov3d::io {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string() + ": cannot open file");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": invalid JSON: " + e.what());
  }
}

void WriteJson(const fs::path& path, const json& value) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw LoadError(path.string() + ": cannot open for writing");
  out << value.dump(2) << "\n";
}

// Reads a tensor referenced from the manifest and checks its shape; a
// negative expected dim matches anything.
Tensor ReadChecked(const fs::path& path, DType dtype,
                   const std::vector<std::int64_t>& expected) {
  if (!fs::exists(path)) {
    throw LoadError(path.string() + ": referenced file does not exist");
  }
  Tensor tensor = ReadTensor(path);
  if (tensor.dtype() != dtype) {
    throw LoadError(path.string() + ": expected " + ToString(dtype) +
                    " tensor, found " + ToString(tensor.dtype()));
  }
  bool ok = tensor.dims.size() == expected.size();
  for (std::size_t i = 0; ok && i < expected.size(); ++i) {
    ok = expected[i] < 0 ||
         tensor.dims[i] == static_cast<std::uint64_t>(expected[i]);
  }
  if (!ok) {
    std::string want, got;
    for (auto d : expected) want += (d < 0 ? "?" : std::to_string(d)) + " ";
    for (auto d : tensor.dims) got += std::to_string(d) + " ";
    throw LoadError(path.string() + ": dims [ " + got + "] do not match [ " +
                    want + "]");
  }
  return tensor;
}

template <typename T>
T Field(const json& object, const char* key, const std::string& where) {
  if (!object.contains(key)) {
    throw LoadError(where + ": missing field '" + key + "'");
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& e) {
    throw LoadError(where + ": field '" + key + "': " + e.what());
  }
}

std::vector<Eigen::Vector3f> ToPoints(const std::vector<float>& flat) {
  std::vector<Eigen::Vector3f> points(flat.size() / 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    points[i] = Eigen::Vector3f(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]);
  }
  return points;
}

std::vector<float> FromPoints(const std::vector<Eigen::Vector3f>& points) {
  std::vector<float> flat;
  flat.reserve(points.size() * 3);
  for (const auto& p : points) flat.insert(flat.end(), {p.x(), p.y(), p.z()});
  return flat;
}

CameraModel ParseCamera(const json& camera, const std::string& where) {
  const auto k = Field<std::vector<std::vector<double>>>(camera, "intrinsics",
                                                         where);
  const auto t = Field<std::vector<std::vector<double>>>(camera, "extrinsics",
                                                         where);
  if (k.size() != 3 || t.size() != 4) {
    throw LoadError(where + ": intrinsics must be 3x3, extrinsics 4x4");
  }
  Eigen::Matrix3d intrinsics;
  Eigen::Matrix4d extrinsics;
  for (int r = 0; r < 3; ++r) {
    if (k[r].size() != 3) throw LoadError(where + ": intrinsics must be 3x3");
    for (int c = 0; c < 3; ++c) intrinsics(r, c) = k[r][c];
  }
  for (int r = 0; r < 4; ++r) {
    if (t[r].size() != 4) throw LoadError(where + ": extrinsics must be 4x4");
    for (int c = 0; c < 4; ++c) extrinsics(r, c) = t[r][c];
  }
  try {
    return CameraModel::Create(intrinsics, extrinsics,
                               Field<int>(camera, "width", where),
                               Field<int>(camera, "height", where));
  } catch (const ConfigError& e) {
    throw LoadError(where + ": invalid camera: " + e.what());
  }
}

json CameraToJson(const CameraModel& camera) {
  json k = json::array(), t = json::array();
  for (int r = 0; r < 3; ++r) {
    k.push_back({camera.intrinsics()(r, 0), camera.intrinsics()(r, 1),
                 camera.intrinsics()(r, 2)});
  }
  for (int r = 0; r < 4; ++r) {
    t.push_back({camera.extrinsics()(r, 0), camera.extrinsics()(r, 1),
                 camera.extrinsics()(r, 2), camera.extrinsics()(r, 3)});
  }
  return {{"width", camera.width()},
          {"height", camera.height()},
          {"intrinsics", k},
          {"extrinsics", t}};
}

ViewBundle LoadView(const json& entry, const fs::path& base, int dim,
                    std::size_t index) {
  const std::string where = "view " + std::to_string(index);
  ViewBundle view;
  view.image_id = Field<std::string>(entry, "image_id", where);
  const std::string vwhere = "view '" + view.image_id + "'";
  view.camera = ParseCamera(Field<json>(entry, "camera", vwhere), vwhere);
  const int h = view.camera.height(), w = view.camera.width();

  const fs::path depth_path = base / Field<std::string>(entry, "depth", vwhere);
  Tensor depth = ReadChecked(depth_path, DType::kFloat32, {h, w});
  try {
    view.depth = DepthMap(h, w, AsFloat32(depth, depth_path.string()));
  } catch (const Error& e) {
    throw LoadError(depth_path.string() + ": " + e.what());
  }

  const fs::path feature_path =
      base / Field<std::string>(entry, "features", vwhere);
  Tensor features = ReadChecked(feature_path, DType::kFloat32, {h, w, -1});
  if (features.dims[2] != static_cast<std::uint64_t>(dim)) {
    throw LoadError(feature_path.string() + ": feature dim " +
                    std::to_string(features.dims[2]) +
                    " differs from scene feature_dim " + std::to_string(dim));
  }
  view.features = DenseFeatureMap(
      h, w, dim,
      std::move(std::get<std::vector<float>>(features.values)));

  if (entry.contains("regions")) {
    const json& regions = entry.at("regions");
    const fs::path mask_path = base / Field<std::string>(regions, "masks", vwhere);
    const fs::path emb_path =
        base / Field<std::string>(regions, "embeddings", vwhere);
    const fs::path conf_path =
        base / Field<std::string>(regions, "confidences", vwhere);
    const Tensor masks = ReadChecked(mask_path, DType::kUInt8, {-1, h, w});
    const auto s = static_cast<std::int64_t>(masks.dims[0]);
    const Tensor embeddings = ReadChecked(emb_path, DType::kFloat32, {s, -1});
    if (embeddings.dims[1] != static_cast<std::uint64_t>(dim)) {
      throw LoadError(emb_path.string() + ": region embedding dim " +
                      std::to_string(embeddings.dims[1]) +
                      " differs from scene feature_dim " + std::to_string(dim));
    }
    const Tensor confidences = ReadChecked(conf_path, DType::kFloat32, {s});
    const auto& mask_values = AsUInt8(masks, mask_path.string());
    const auto& emb_values = AsFloat32(embeddings, emb_path.string());
    const auto& conf_values = AsFloat32(confidences, conf_path.string());
    const std::size_t pixels = static_cast<std::size_t>(h) * w;
    for (std::int64_t r = 0; r < s; ++r) {
      try {
        view.regions.emplace_back(
            h, w,
            std::vector<std::uint8_t>(mask_values.begin() + r * pixels,
                                      mask_values.begin() + (r + 1) * pixels),
            std::vector<float>(emb_values.begin() + r * dim,
                               emb_values.begin() + (r + 1) * dim),
            conf_values[r]);
      } catch (const Error& e) {
        throw LoadError(mask_path.string() + ": region " + std::to_string(r) +
                        ": " + e.what());
      }
    }
  }

  if (entry.contains("proposals")) {
    const json& proposals = entry.at("proposals");
    const fs::path index_path =
        base / Field<std::string>(proposals, "index", vwhere);
    const fs::path emb_path =
        base / Field<std::string>(proposals, "embeddings", vwhere);
    const json index = ReadJson(index_path);
    const Tensor embeddings = ReadChecked(emb_path, DType::kFloat32, {-1, dim});
    const auto& values = AsFloat32(embeddings, emb_path.string());
    const auto rows = embeddings.dims[0];
    const auto lists =
        Field<std::vector<json>>(index, "regions", index_path.string());
    if (lists.size() != view.regions.size()) {
      throw LoadError(index_path.string() + ": " +
                      std::to_string(lists.size()) +
                      " proposal lists for " +
                      std::to_string(view.regions.size()) + " regions");
    }
    for (const json& list : lists) {
      TextProposalSet set;
      for (const json& item : list) {
        const auto text = Field<std::string>(item, "text", index_path.string());
        const auto row = Field<std::int64_t>(item, "row", index_path.string());
        if (row < 0 || static_cast<std::uint64_t>(row) >= rows) {
          throw LoadError(index_path.string() + ": proposal '" + text +
                          "' references embedding row " + std::to_string(row) +
                          " of " + std::to_string(rows));
        }
        set.push_back({text, std::vector<float>(values.begin() + row * dim,
                                                values.begin() + (row + 1) * dim)});
      }
      view.proposals.push_back(std::move(set));
    }
  }

  try {
    view.Validate(dim);
  } catch (const Error& e) {
    throw LoadError(e.what());
  }
  return view;
}

std::string ViewFile(std::size_t index, const char* suffix) {
  char name[64];
  std::snprintf(name, sizeof(name), "view_%04zu_%s", index, suffix);
  return name;
}

}  // namespace

Scene LoadScene(const fs::path& manifest_path, unsigned threads) {
  const json manifest = ReadJson(manifest_path);
  const std::string where = manifest_path.string();
  const fs::path base = manifest_path.parent_path();
  const int version = Field<int>(manifest, "format_version", where);
  if (version != kManifestVersion) {
    throw LoadError(where + ": unsupported format_version " +
                    std::to_string(version));
  }
  Scene scene;
  scene.scene_id = Field<std::string>(manifest, "scene_id", where);
  scene.feature_dim = Field<int>(manifest, "feature_dim", where);
  if (scene.feature_dim <= 0) {
    throw LoadError(where + ": feature_dim must be positive");
  }
  const int dim = scene.feature_dim;

  const json cloud = Field<json>(manifest, "point_cloud", where);
  const fs::path points_path = base / Field<std::string>(cloud, "positions", where);
  const Tensor points = ReadChecked(points_path, DType::kFloat32, {-1, 3});
  scene.cloud.positions = ToPoints(AsFloat32(points, points_path.string()));
  const auto m = static_cast<std::int64_t>(scene.cloud.size());
  if (cloud.contains("normals")) {
    const fs::path p = base / cloud.at("normals").get<std::string>();
    scene.cloud.normals =
        ToPoints(AsFloat32(ReadChecked(p, DType::kFloat32, {m, 3}), p.string()));
  }
  if (cloud.contains("labels")) {
    const fs::path p = base / cloud.at("labels").get<std::string>();
    scene.cloud.labels = AsInt32(ReadChecked(p, DType::kInt32, {m}), p.string());
  }
  if (cloud.contains("instances")) {
    const fs::path p = base / cloud.at("instances").get<std::string>();
    scene.cloud.instances =
        AsInt32(ReadChecked(p, DType::kInt32, {m}), p.string());
  }
  try {
    scene.cloud.Validate();
  } catch (const Error& e) {
    throw LoadError(points_path.string() + ": " + e.what());
  }

  if (manifest.contains("label_set")) {
    const json& labels = manifest.at("label_set");
    const auto names = Field<std::vector<std::string>>(labels, "names", where);
    const fs::path emb_path =
        base / Field<std::string>(labels, "embeddings", where);
    const Tensor embeddings = ReadChecked(
        emb_path, DType::kFloat32, {static_cast<std::int64_t>(names.size()), -1});
    if (embeddings.dims[1] != static_cast<std::uint64_t>(dim)) {
      throw LoadError(emb_path.string() + ": label embedding dim " +
                      std::to_string(embeddings.dims[1]) +
                      " differs from scene feature_dim " + std::to_string(dim));
    }
    eval::BucketMap buckets;
    if (labels.contains("buckets")) {
      for (const auto& [name, bucket] : labels.at("buckets").items()) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
          throw LoadError(where + ": bucket names unknown label '" + name + "'");
        }
        try {
          buckets[static_cast<std::int32_t>(it - names.begin())] =
              eval::ParseBucket(bucket.get<std::string>());
        } catch (const Error& e) {
          throw LoadError(where + ": " + e.what());
        }
      }
    }
    const auto ignore = labels.value("ignore_label", -1);
    try {
      scene.labels.emplace(names, dim, AsFloat32(embeddings, emb_path.string()),
                           std::move(buckets), ignore);
    } catch (const Error& e) {
      throw LoadError(emb_path.string() + ": " + e.what());
    }
  }

  const auto entries = Field<std::vector<json>>(manifest, "views", where);
  scene.views.resize(entries.size());
  ParallelFor(entries.size(), threads, [&](std::size_t v) {
    scene.views[v] = LoadView(entries[v], base, dim, v);
  });
  return scene;
}

fs::path SaveScene(const Scene& scene, const fs::path& directory) {
  fs::create_directories(directory);
  const int dim = scene.feature_dim;
  const auto m = static_cast<std::uint64_t>(scene.cloud.size());
  json manifest;
  manifest["format_version"] = kManifestVersion;
  manifest["scene_id"] = scene.scene_id;
  manifest["feature_dim"] = dim;

  json cloud;
  WriteTensor(directory / "points.mvov",
              MakeTensor(FromPoints(scene.cloud.positions), {m, 3}));
  cloud["positions"] = "points.mvov";
  if (scene.cloud.has_normals()) {
    WriteTensor(directory / "normals.mvov",
                MakeTensor(FromPoints(scene.cloud.normals), {m, 3}));
    cloud["normals"] = "normals.mvov";
  }
  if (scene.cloud.has_labels()) {
    WriteTensor(directory / "labels.mvov", MakeTensor(scene.cloud.labels, {m}));
    cloud["labels"] = "labels.mvov";
  }
  if (scene.cloud.has_instances()) {
    WriteTensor(directory / "instances.mvov",
                MakeTensor(scene.cloud.instances, {m}));
    cloud["instances"] = "instances.mvov";
  }
  manifest["point_cloud"] = cloud;

  if (scene.labels) {
    const eval::LabelSet& labels = *scene.labels;
    WriteTensor(directory / "label_embeddings.mvov",
                MakeTensor(labels.embeddings(),
                           {labels.size(), static_cast<std::uint64_t>(dim)}));
    json label_json;
    label_json["names"] = labels.names();
    label_json["embeddings"] = "label_embeddings.mvov";
    label_json["ignore_label"] = labels.ignore_label();
    if (!labels.buckets().empty()) {
      json buckets = json::object();
      for (const auto& [label, bucket] : labels.buckets()) {
        buckets[labels.names()[label]] = eval::ToString(bucket);
      }
      label_json["buckets"] = buckets;
    }
    manifest["label_set"] = label_json;
  }

  json views = json::array();
  for (std::size_t v = 0; v < scene.views.size(); ++v) {
    const ViewBundle& view = scene.views[v];
    const auto h = static_cast<std::uint64_t>(view.camera.height());
    const auto w = static_cast<std::uint64_t>(view.camera.width());
    json entry;
    entry["image_id"] = view.image_id;
    entry["camera"] = CameraToJson(view.camera);
    entry["depth"] = ViewFile(v, "depth.mvov");
    WriteTensor(directory / ViewFile(v, "depth.mvov"),
                MakeTensor(view.depth.values(), {h, w}));
    entry["features"] = ViewFile(v, "features.mvov");
    WriteTensor(directory / ViewFile(v, "features.mvov"),
                MakeTensor(view.features.data(),
                           {h, w, static_cast<std::uint64_t>(dim)}));
    if (!view.regions.empty()) {
      std::vector<std::uint8_t> masks;
      std::vector<float> embeddings, confidences;
      for (const RegionMask& region : view.regions) {
        masks.insert(masks.end(), region.mask().begin(), region.mask().end());
        embeddings.insert(embeddings.end(), region.embedding().begin(),
                          region.embedding().end());
        confidences.push_back(region.confidence());
      }
      const std::uint64_t s = view.regions.size();
      WriteTensor(directory / ViewFile(v, "masks.mvov"),
                  MakeTensor(std::move(masks), {s, h, w}));
      WriteTensor(directory / ViewFile(v, "region_embeddings.mvov"),
                  MakeTensor(std::move(embeddings),
                             {s, static_cast<std::uint64_t>(dim)}));
      WriteTensor(directory / ViewFile(v, "region_confidences.mvov"),
                  MakeTensor(std::move(confidences), {s}));
      entry["regions"] = {{"masks", ViewFile(v, "masks.mvov")},
                          {"embeddings", ViewFile(v, "region_embeddings.mvov")},
                          {"confidences",
                           ViewFile(v, "region_confidences.mvov")}};
    }
    if (!view.proposals.empty()) {
      json lists = json::array();
      std::vector<float> embeddings;
      std::uint64_t row = 0;
      for (const TextProposalSet& set : view.proposals) {
        json list = json::array();
        for (const TextProposal& proposal : set) {
          list.push_back({{"text", proposal.text}, {"row", row++}});
          embeddings.insert(embeddings.end(), proposal.embedding.begin(),
                            proposal.embedding.end());
        }
        lists.push_back(list);
      }
      WriteJson(directory / ViewFile(v, "proposals.json"), {{"regions", lists}});
      WriteTensor(directory / ViewFile(v, "proposal_embeddings.mvov"),
                  MakeTensor(std::move(embeddings),
                             {row, static_cast<std::uint64_t>(dim)}));
      entry["proposals"] = {
          {"index", ViewFile(v, "proposals.json")},
          {"embeddings", ViewFile(v, "proposal_embeddings.mvov")}};
    }
    views.push_back(entry);
  }
  manifest["views"] = views;
  const fs::path manifest_path = directory / kManifestName;
  WriteJson(manifest_path, manifest);
  return manifest_path;
}

eval::BucketMap LoadBucketFile(const fs::path& path,
                               const std::vector<std::string>* names) {
  const json root = ReadJson(path);
  if (!root.is_object()) {
    throw LoadError(path.string() + ": bucket file must be a JSON object");
  }
  eval::BucketMap buckets;
  for (const auto& [key, value] : root.items()) {
    std::int32_t label = -1;
    const bool numeric = !key.empty() && key.find_first_not_of(
                                             "0123456789") == std::string::npos;
    if (numeric) {
      label = std::stoi(key);
    } else if (names != nullptr) {
      const auto it = std::find(names->begin(), names->end(), key);
      if (it != names->end()) label = static_cast<std::int32_t>(it - names->begin());
    }
    if (label < 0) {
      throw LoadError(path.string() + ": cannot resolve label '" + key + "'");
    }
    try {
      buckets[label] = eval::ParseBucket(value.get<std::string>());
    } catch (const std::exception& e) {
      throw LoadError(path.string() + ": label '" + key + "': " + e.what());
    }
  }
  return buckets;
}

std::vector<std::int32_t> ReadLabels(const fs::path& path) {
  const Tensor tensor = ReadChecked(path, DType::kInt32, {-1});
  return AsInt32(tensor, path.string());
}

void WriteLabels(const fs::path& path, const std::vector<std::int32_t>& labels) {
  WriteTensor(path, MakeTensor(labels, {labels.size()}));
}

PointFeatureField ReadPointFeatures(const fs::path& features,
                                    const fs::path& counts) {
  Tensor f = ReadChecked(features, DType::kFloat32, {-1, -1});
  const auto m = static_cast<std::int64_t>(f.dims[0]);
  const Tensor c = ReadChecked(counts, DType::kInt32, {m});
  std::vector<std::uint32_t> count_values;
  count_values.reserve(m);
  for (std::int32_t v : AsInt32(c, counts.string())) {
    if (v < 0) throw LoadError(counts.string() + ": negative count");
    count_values.push_back(static_cast<std::uint32_t>(v));
  }
  return PointFeatureField(static_cast<std::size_t>(m),
                           static_cast<int>(f.dims[1]),
                           std::move(std::get<std::vector<float>>(f.values)),
                           std::move(count_values));
}

void WritePointFeatures(const fs::path& features, const fs::path& counts,
                        const PointFeatureField& field) {
  const std::uint64_t m = field.num_points();
  WriteTensor(features, MakeTensor(field.data(),
                                   {m, static_cast<std::uint64_t>(field.dim())}));
  std::vector<std::int32_t> count_values(field.counts().begin(),
                                         field.counts().end());
  WriteTensor(counts, MakeTensor(std::move(count_values), {m}));
}

}  // namespace mvov3d::io
