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

// Python bindings for the mvov3d core. Arrays cross the boundary as float32,
// int32 and uint8 numpy arrays in C order.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mvov3d/errors.h"
#include "mvov3d/fusion.h"
#include "mvov3d/merge.h"
#include "mvov3d/pipeline.h"
#include "mvov3d/query_eval.h"
#include "mvov3d/refine1d.h"
#include "mvov3d/refine2d.h"
#include "mvov3d/scene_io.h"
#include "mvov3d/superpoint.h"
#include "mvov3d/synthetic.h"
#include "mvov3d/tensor_io.h"

namespace py = pybind11;

namespace mvov3d::python {
namespace {

template <typename T>
using Array = py::array_t<T, py::array::c_style | py::array::forcecast>;

template <typename T>
void RequireRank(const Array<T>& a, py::ssize_t rank, const char* what) {
  if (a.ndim() != rank) {
    throw py::value_error(std::string(what) + " must have " +
                          std::to_string(rank) + " dimensions, got " +
                          std::to_string(a.ndim()));
  }
}

template <typename T>
std::vector<T> ToVector(const Array<T>& a) {
  return std::vector<T>(a.data(), a.data() + a.size());
}

template <typename T>
py::array_t<T> ToArray(const std::vector<T>& v, std::vector<py::ssize_t> shape) {
  py::array_t<T> out(shape);
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

PointFeatureField MakeField(const Array<float>& features,
                            const Array<std::uint32_t>& counts) {
  RequireRank(features, 2, "features");
  RequireRank(counts, 1, "counts");
  if (counts.shape(0) != features.shape(0)) {
    throw py::value_error("features and counts disagree on point count");
  }
  return PointFeatureField(features.shape(0), static_cast<int>(features.shape(1)),
                           ToVector(features), ToVector(counts));
}

py::tuple FieldToArrays(const PointFeatureField& field) {
  const auto n = static_cast<py::ssize_t>(field.num_points());
  return py::make_tuple(ToArray(field.data(), {n, field.dim()}),
                        ToArray(field.counts(), {n}));
}

SparseFeatureMap MakeSparse(const Array<float>& values,
                            const Array<std::uint32_t>& counts) {
  RequireRank(values, 3, "sparse map values");
  RequireRank(counts, 2, "sparse map counts");
  const int h = static_cast<int>(values.shape(0));
  const int w = static_cast<int>(values.shape(1));
  const int c = static_cast<int>(values.shape(2));
  if (counts.shape(0) != h || counts.shape(1) != w) {
    throw py::value_error("sparse map values and counts disagree on shape");
  }
  SparseFeatureMap map(h, w, c);
  const float* src = values.data();
  for (int r = 0; r < h; ++r) {
    for (int col = 0; col < w; ++col) {
      auto px = map.at(r, col);
      std::copy(src, src + c, px.begin());
      src += c;
      map.set_count(r, col, counts.at(r, col));
    }
  }
  return map;
}

py::tuple SparseToArrays(const SparseFeatureMap& map) {
  return py::make_tuple(
      ToArray(map.data(), {map.height(), map.width(), map.dim()}),
      ToArray(map.counts(), {map.height(), map.width()}));
}

ScenePointCloud MakeCloud(const Array<float>& positions,
                          std::optional<Array<float>> normals) {
  RequireRank(positions, 2, "positions");
  if (positions.shape(1) != 3) throw py::value_error("positions must be N x 3");
  ScenePointCloud cloud;
  cloud.positions.resize(positions.shape(0));
  for (py::ssize_t i = 0; i < positions.shape(0); ++i) {
    cloud.positions[i] = {positions.at(i, 0), positions.at(i, 1), positions.at(i, 2)};
  }
  if (normals) {
    if (normals->ndim() != 2 || normals->shape(0) != positions.shape(0) ||
        normals->shape(1) != 3) {
      throw py::value_error("normals must be N x 3 like positions");
    }
    cloud.normals.resize(positions.shape(0));
    for (py::ssize_t i = 0; i < positions.shape(0); ++i) {
      cloud.normals[i] = {normals->at(i, 0), normals->at(i, 1), normals->at(i, 2)};
    }
  }
  return cloud;
}

superpoint::SuperpointPartition MakePartition(const Array<std::int32_t>& labels) {
  RequireRank(labels, 1, "superpoint labels");
  superpoint::SuperpointPartition partition;
  partition.labels = ToVector(labels);
  for (std::int32_t l : partition.labels) {
    if (l < 0) throw py::value_error("superpoint labels must be non-negative");
    if (static_cast<std::size_t>(l) >= partition.sizes.size()) {
      partition.sizes.resize(l + 1, 0);
    }
    ++partition.sizes[l];
  }
  return partition;
}

eval::LabelSet MakeLabelSet(const Array<float>& embeddings) {
  RequireRank(embeddings, 2, "label embeddings");
  std::vector<std::string> names;
  for (py::ssize_t i = 0; i < embeddings.shape(0); ++i) {
    names.push_back(std::to_string(i));
  }
  return eval::LabelSet(std::move(names), static_cast<int>(embeddings.shape(1)),
                        ToVector(embeddings));
}

py::dict ReportToDict(const eval::EvalReport& report) {
  py::list classes;
  for (const auto& m : report.classes) {
    py::dict c;
    c["label"] = m.label;
    c["iou"] = m.iou;
    c["accuracy"] = m.accuracy;
    c["gt_points"] = m.gt_points;
    c["bucket"] = m.bucket ? py::cast(eval::ToString(*m.bucket)) : py::none();
    classes.append(c);
  }
  py::dict buckets;
  for (const auto& [bucket, m] : report.buckets) {
    py::dict b;
    b["miou"] = m.miou;
    b["macc"] = m.macc;
    b["num_classes"] = m.num_classes;
    buckets[py::str(eval::ToString(bucket))] = b;
  }
  py::dict out;
  out["miou"] = report.miou;
  out["macc"] = report.macc;
  out["overall_accuracy"] = report.overall_accuracy();
  out["evaluated_points"] = report.evaluated_points;
  out["unlabeled_points"] = report.unlabeled_points;
  out["classes"] = classes;
  out["buckets"] = buckets;
  return out;
}

py::array TensorToArray(const io::Tensor& tensor) {
  std::vector<py::ssize_t> shape(tensor.dims.begin(), tensor.dims.end());
  return std::visit(
      [&](const auto& values) -> py::array { return ToArray(values, shape); },
      tensor.values);
}

template <typename T>
io::Tensor ArrayToTensor(const py::array& a) {
  const auto typed = Array<T>::ensure(a);
  std::vector<std::uint64_t> dims(typed.shape(), typed.shape() + typed.ndim());
  return io::MakeTensor(ToVector(typed), std::move(dims));
}

}  // namespace
}  // namespace mvov3d::python

PYBIND11_MODULE(_mvov3d, m) {
  using namespace mvov3d;
  using namespace mvov3d::python;
  m.doc() = "Training-free open-vocabulary 3D segmentation core";

  auto& base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<DegenerateInputError>(m, "DegenerateInputError",
                                               base.ptr());
  py::register_exception<LookupError>(m, "LookupError", base.ptr());
  py::register_exception<LoadError>(m, "LoadError", base.ptr());
  py::register_exception<PipelineError>(m, "PipelineError", base.ptr());

  m.attr("DELTA_SCANNET200") = refine1d::kDeltaScanNet200;
  m.attr("DELTA_MATTERPORT3D") = refine1d::kDeltaMatterport3D;
  m.attr("DELTA_REPLICA") = refine1d::kDeltaReplica;

  // Tensor files.
  m.def("read_tensor",
        [](const std::filesystem::path& path) {
          return TensorToArray(io::ReadTensor(path));
        },
        py::arg("path"));
  m.def("write_tensor",
        [](const std::filesystem::path& path, const py::array& array) {
          // uint8 stays uint8, other integer and bool types widen to int32.
          const std::string kind = py::str(array.dtype().attr("kind"));
          if (kind == "f") {
            io::WriteTensor(path, ArrayToTensor<float>(array));
          } else if (py::isinstance<py::array_t<std::uint8_t>>(array)) {
            io::WriteTensor(path, ArrayToTensor<std::uint8_t>(array));
          } else if (kind == "i" || kind == "u" || kind == "b") {
            io::WriteTensor(path, ArrayToTensor<std::int32_t>(array));
          } else {
            throw py::type_error("unsupported dtype for tensor file");
          }
        },
        py::arg("path"), py::arg("array"));

  // Per-view refinement.
  m.def("compose_region_maps",
        [](const Array<std::uint8_t>& masks, const Array<float>& embeddings) {
          RequireRank(masks, 3, "masks");
          RequireRank(embeddings, 2, "embeddings");
          if (masks.shape(0) != embeddings.shape(0)) {
            throw py::value_error("one embedding per mask required");
          }
          const int h = static_cast<int>(masks.shape(1));
          const int w = static_cast<int>(masks.shape(2));
          const int c = static_cast<int>(embeddings.shape(1));
          std::vector<RegionMask> regions;
          const std::size_t plane = static_cast<std::size_t>(h) * w;
          for (py::ssize_t r = 0; r < masks.shape(0); ++r) {
            std::vector<std::uint8_t> mask(masks.data() + r * plane,
                                           masks.data() + (r + 1) * plane);
            std::vector<float> emb(embeddings.data() + r * c,
                                   embeddings.data() + (r + 1) * c);
            regions.emplace_back(h, w, std::move(mask), std::move(emb));
          }
          return SparseToArrays(
              refine2d::ComposeRegionMaps({h, w, c}, regions));
        },
        py::arg("masks"), py::arg("embeddings"),
        "Averages region embeddings over their masks. Returns (values, counts).");

  m.def("select_text",
        [](const Array<float>& region, const Array<float>& proposals,
           double delta) -> std::optional<py::tuple> {
          RequireRank(region, 1, "region embedding");
          RequireRank(proposals, 2, "proposals");
          TextProposalSet set;
          const auto c = proposals.shape(1);
          for (py::ssize_t t = 0; t < proposals.shape(0); ++t) {
            set.push_back({std::to_string(t),
                           std::vector<float>(proposals.data() + t * c,
                                              proposals.data() + (t + 1) * c)});
          }
          const auto selection = refine1d::SelectText(
              std::span<const float>(region.data(), region.size()), set, delta);
          if (!selection) return std::nullopt;
          return py::make_tuple(selection->index, selection->score);
        },
        py::arg("region_embedding"), py::arg("proposals"), py::arg("delta"),
        "Best proposal by cosine as (index, score), or None below delta.");

  m.def("merge_pixel_features",
        [](const Array<float>& base, const Array<float>& region,
           const Array<std::uint32_t>& region_counts, const Array<float>& text,
           const Array<std::uint32_t>& text_counts) {
          RequireRank(base, 3, "base");
          DenseFeatureMap dense(static_cast<int>(base.shape(0)),
                                static_cast<int>(base.shape(1)),
                                static_cast<int>(base.shape(2)), ToVector(base));
          const auto merged = merge::MergePixelFeatures(
              dense, MakeSparse(region, region_counts),
              MakeSparse(text, text_counts));
          return ToArray(merged.data(), {merged.height(), merged.width(),
                                         merged.dim()});
        },
        py::arg("base"), py::arg("region"), py::arg("region_counts"),
        py::arg("text"), py::arg("text_counts"));

  // Superpoints.
  m.def("segment_graph",
        [](std::size_t num_nodes, const Array<std::int64_t>& edges,
           const Array<double>& weights, double k_param, std::size_t min_size) {
          RequireRank(edges, 2, "edges");
          RequireRank(weights, 1, "weights");
          if (edges.shape(1) != 2 || edges.shape(0) != weights.shape(0)) {
            throw py::value_error("edges must be E x 2 with E weights");
          }
          superpoint::PointAdjacencyGraph graph;
          graph.num_nodes = num_nodes;
          for (py::ssize_t e = 0; e < edges.shape(0); ++e) {
            auto a = edges.at(e, 0), b = edges.at(e, 1);
            if (a < 0 || b < 0 || static_cast<std::size_t>(std::max(a, b)) >= num_nodes) {
              throw py::value_error("edge endpoint out of range");
            }
            if (a > b) std::swap(a, b);
            graph.edges.push_back({static_cast<std::uint32_t>(a),
                                   static_cast<std::uint32_t>(b), weights.at(e)});
          }
          const auto partition = superpoint::SegmentGraph(graph, k_param, min_size);
          return ToArray(partition.labels,
                         {static_cast<py::ssize_t>(partition.labels.size())});
        },
        py::arg("num_nodes"), py::arg("edges"), py::arg("weights"),
        py::arg("k_param"), py::arg("min_size"));

  m.def("compute_superpoints",
        [](const Array<float>& positions, std::optional<Array<float>> normals,
           int knn, double k_param, std::size_t min_size, unsigned threads) {
          const ScenePointCloud cloud = MakeCloud(positions, normals);
          superpoint::SuperpointConfig config;
          config.knn = knn;
          config.k_param = k_param;
          config.min_size = min_size;
          const auto partition =
              superpoint::ComputeSuperpoints(cloud, config, threads);
          return ToArray(partition.labels,
                         {static_cast<py::ssize_t>(partition.labels.size())});
        },
        py::arg("positions"), py::arg("normals") = py::none(),
        py::arg("knn") = 16, py::arg("k_param") = 0.1,
        py::arg("min_size") = 20, py::arg("threads") = 1);

  m.def("pool_superpoints",
        [](const Array<float>& features, const Array<std::uint32_t>& counts,
           const Array<std::int32_t>& labels) {
          return FieldToArrays(superpoint::PoolSuperpoints(
              MakeField(features, counts), MakePartition(labels)));
        },
        py::arg("features"), py::arg("counts"), py::arg("labels"));

  // Query and evaluation.
  m.def("assign_labels",
        [](const Array<float>& features, const Array<std::uint32_t>& counts,
           const Array<float>& label_embeddings, unsigned threads) {
          const auto labels = eval::AssignLabels(
              MakeField(features, counts), MakeLabelSet(label_embeddings), threads);
          return ToArray(labels, {static_cast<py::ssize_t>(labels.size())});
        },
        py::arg("features"), py::arg("counts"), py::arg("label_embeddings"),
        py::arg("threads") = 1);

  m.def("evaluate",
        [](const Array<std::int32_t>& pred, const Array<std::int32_t>& gt,
           int num_classes, std::int32_t ignore,
           const std::map<std::int32_t, std::string>& buckets) {
          RequireRank(pred, 1, "pred");
          RequireRank(gt, 1, "gt");
          eval::BucketMap map;
          for (const auto& [label, name] : buckets) {
            map[label] = eval::ParseBucket(name);
          }
          const auto confusion = eval::ComputeConfusion(
              std::span<const std::int32_t>(pred.data(), pred.size()),
              std::span<const std::int32_t>(gt.data(), gt.size()), num_classes,
              ignore);
          return ReportToDict(eval::ComputeMetrics(confusion, map));
        },
        py::arg("pred"), py::arg("gt"), py::arg("num_classes"),
        py::arg("ignore") = -1,
        py::arg("buckets") = std::map<std::int32_t, std::string>{});

  // Scenes and the end-to-end pipeline.
  py::class_<io::Scene>(m, "Scene")
      .def_readonly("scene_id", &io::Scene::scene_id)
      .def_readonly("feature_dim", &io::Scene::feature_dim)
      .def_property_readonly("num_points",
                             [](const io::Scene& s) { return s.cloud.size(); })
      .def_property_readonly("num_views",
                             [](const io::Scene& s) { return s.views.size(); })
      .def_property_readonly(
          "positions",
          [](const io::Scene& s) {
            std::vector<float> flat;
            flat.reserve(s.cloud.size() * 3);
            for (const auto& p : s.cloud.positions) {
              flat.insert(flat.end(), {p.x(), p.y(), p.z()});
            }
            return ToArray(flat, {static_cast<py::ssize_t>(s.cloud.size()), 3});
          })
      .def_property_readonly(
          "labels",
          [](const io::Scene& s) {
            return ToArray(s.cloud.labels,
                           {static_cast<py::ssize_t>(s.cloud.labels.size())});
          })
      .def_property_readonly(
          "instances",
          [](const io::Scene& s) {
            return ToArray(s.cloud.instances,
                           {static_cast<py::ssize_t>(s.cloud.instances.size())});
          })
      .def_property_readonly("label_names", [](const io::Scene& s) {
        return s.labels ? s.labels->names() : std::vector<std::string>{};
      });

  m.def("load_scene", &io::LoadScene, py::arg("manifest"), py::arg("threads") = 1);

  m.def("generate_synthetic",
        [](std::uint64_t seed, const std::filesystem::path& directory, int planes,
           int points_per_plane, int views, double noise_sigma, int occluders,
           bool occlusion_noise, int feature_dim) {
          synthetic::SyntheticSpec spec;
          spec.planes = planes;
          spec.points_per_plane = points_per_plane;
          spec.views = views;
          spec.noise_sigma = noise_sigma;
          spec.occluders = occluders;
          spec.occlusion_noise = occlusion_noise;
          spec.feature_dim = feature_dim;
          return synthetic::GenerateSynthetic(seed, spec, directory);
        },
        py::arg("seed"), py::arg("directory"), py::arg("planes") = 4,
        py::arg("points_per_plane") = 400, py::arg("views") = 6,
        py::arg("noise_sigma") = 0.0, py::arg("occluders") = 0,
        py::arg("occlusion_noise") = false, py::arg("feature_dim") = 16,
        "Writes a synthetic scene and returns its manifest path.");

  py::class_<PipelineConfig>(m, "PipelineConfig")
      .def(py::init<>())
      .def_readwrite("delta", &PipelineConfig::delta)
      .def_readwrite("use_region", &PipelineConfig::use_region)
      .def_readwrite("use_text", &PipelineConfig::use_text)
      .def_readwrite("depth_tolerance", &PipelineConfig::depth_tolerance)
      .def_readwrite("threads", &PipelineConfig::threads)
      .def_property(
          "occlusion_mode",
          [](const PipelineConfig& c) { return fusion::ToString(c.occlusion.mode); },
          [](PipelineConfig& c, const std::string& mode) {
            c.occlusion.mode = fusion::ParseOcclusionMode(mode);
          })
      .def_property(
          "occlusion_threshold",
          [](const PipelineConfig& c) { return c.occlusion.threshold; },
          [](PipelineConfig& c, double t) { c.occlusion.threshold = t; })
      .def_property(
          "superpoints",
          [](const PipelineConfig& c) { return c.superpoints.enabled; },
          [](PipelineConfig& c, bool on) { c.superpoints.enabled = on; })
      .def_property(
          "sp_knn", [](const PipelineConfig& c) { return c.superpoints.knn; },
          [](PipelineConfig& c, int k) { c.superpoints.knn = k; })
      .def_property(
          "sp_k_param",
          [](const PipelineConfig& c) { return c.superpoints.k_param; },
          [](PipelineConfig& c, double k) { c.superpoints.k_param = k; })
      .def_property(
          "sp_min_size",
          [](const PipelineConfig& c) { return c.superpoints.min_size; },
          [](PipelineConfig& c, std::size_t n) { c.superpoints.min_size = n; })
      .def("validate", &PipelineConfig::Validate);

  m.def("run_pipeline",
        [](const io::Scene& scene, const PipelineConfig& config) {
          PipelineResult result;
          {
            py::gil_scoped_release release;
            result = RunPipeline(scene, config);
          }
          py::dict out;
          const auto fused = FieldToArrays(result.fused);
          out["fused"] = fused[0];
          out["fused_counts"] = fused[1];
          const auto features = FieldToArrays(result.features);
          out["features"] = features[0];
          out["counts"] = features[1];
          out["predictions"] = ToArray(
              result.predictions,
              {static_cast<py::ssize_t>(result.predictions.size())});
          out["superpoints"] =
              result.partition
                  ? py::object(ToArray(result.partition->labels,
                                       {static_cast<py::ssize_t>(
                                           result.partition->labels.size())}))
                  : py::object(py::none());
          out["report"] = result.report ? py::object(ReportToDict(*result.report))
                                        : py::object(py::none());
          out["accepted_texts"] = result.accepted_texts;
          return out;
        },
        py::arg("scene"), py::arg("config") = PipelineConfig{});
}
