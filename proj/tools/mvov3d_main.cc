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

// mvov3d command-line tool.
//
// Exit codes: 0 success, 2 validation failure (bad arguments, bad scene
// files), 3 pipeline error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include "mvov3d/errors.h"
#include "mvov3d/fusion.h"
#include "mvov3d/parallel.h"
#include "mvov3d/pipeline.h"
#include "mvov3d/query_eval.h"
#include "mvov3d/refine1d.h"
#include "mvov3d/scene_io.h"
#include "mvov3d/superpoint.h"
#include "mvov3d/synthetic.h"
#include "mvov3d/tensor_io.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace mvov3d::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitPipeline = 3;
constexpr const char* kConfigEnv = "MVOV3D_CONFIG";
constexpr const char* kEchoName = "config_echo.json";

double DatasetDelta(const std::string& dataset) {
  if (dataset == "scannet200") return refine1d::kDeltaScanNet200;
  if (dataset == "matterport3d") return refine1d::kDeltaMatterport3D;
  if (dataset == "replica") return refine1d::kDeltaReplica;
  throw ConfigError("unknown dataset profile '" + dataset + "'");
}

json ConfigToJson(const PipelineConfig& c) {
  json j;
  j["delta"] = c.delta;
  j["use_region"] = c.use_region;
  j["use_text"] = c.use_text;
  j["depth_tolerance"] = c.depth_tolerance;
  j["occlusion"] = {{"mode", fusion::ToString(c.occlusion.mode)},
                    {"threshold", c.occlusion.threshold}};
  j["superpoints"] = {{"enabled", c.superpoints.enabled},
                      {"knn", c.superpoints.knn},
                      {"k_param", c.superpoints.k_param},
                      {"min_size", c.superpoints.min_size},
                      {"absolute_cosine", c.superpoints.absolute_cosine}};
  j["threads"] = c.threads;
  return j;
}

// Overlays the keys present in `j` onto `c`. Accepts a bare config object or
// a previous run's echo (which nests it under "config").
void ApplyConfigJson(const json& root, PipelineConfig& c,
                     const std::string& source) {
  const json& j = root.contains("config") ? root.at("config") : root;
  try {
    if (j.contains("dataset")) c.delta = DatasetDelta(j.at("dataset"));
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    if (j.contains("use_region")) c.use_region = j.at("use_region").get<bool>();
    if (j.contains("use_text")) c.use_text = j.at("use_text").get<bool>();
    if (j.contains("depth_tolerance")) {
      c.depth_tolerance = j.at("depth_tolerance").get<double>();
    }
    if (j.contains("occlusion")) {
      const json& o = j.at("occlusion");
      if (o.contains("mode")) {
        c.occlusion.mode = fusion::ParseOcclusionMode(o.at("mode"));
      }
      if (o.contains("threshold")) {
        c.occlusion.threshold = o.at("threshold").get<double>();
      }
    }
    if (j.contains("superpoints")) {
      const json& s = j.at("superpoints");
      auto& sp = c.superpoints;
      if (s.contains("enabled")) sp.enabled = s.at("enabled").get<bool>();
      if (s.contains("knn")) sp.knn = s.at("knn").get<int>();
      if (s.contains("k_param")) sp.k_param = s.at("k_param").get<double>();
      if (s.contains("min_size")) sp.min_size = s.at("min_size").get<std::size_t>();
      if (s.contains("absolute_cosine")) {
        sp.absolute_cosine = s.at("absolute_cosine").get<bool>();
      }
    }
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error("cannot write " + path.string());
}

// Flags shared by every subcommand that touches pipeline configuration. The
// optionals stay empty unless given so that profile values survive.
struct ConfigFlags {
  std::string config_path;
  std::string dataset;
  std::optional<double> delta;
  bool no_region = false;
  bool no_text = false;
  std::optional<double> depth_tolerance;
  std::string occlusion_mode;
  std::optional<double> occlusion_threshold;
  std::optional<int> sp_knn;
  std::optional<double> sp_k_param;
  std::optional<std::size_t> sp_min_size;
  bool sp_disable = false;
  std::optional<unsigned> threads;

  void Register(CLI::App* app) {
    app->add_option("--config", config_path,
                    std::string("pipeline config JSON (default: $") +
                        kConfigEnv + ")");
    app->add_option("--dataset", dataset, "delta profile")
        ->check(CLI::IsMember({"scannet200", "matterport3d", "replica"}));
    app->add_option("--delta", delta, "text acceptance threshold override");
    app->add_flag("--no-region", no_region, "skip region flooding");
    app->add_flag("--no-text", no_text, "skip text refinement");
    app->add_option("--depth-tolerance", depth_tolerance);
    app->add_option("--occlusion-mode", occlusion_mode)
        ->check(CLI::IsMember({"all", "occluded-only"}));
    app->add_option("--occlusion-threshold", occlusion_threshold);
    app->add_option("--sp-knn", sp_knn);
    app->add_option("--sp-k-param", sp_k_param);
    app->add_option("--sp-min-size", sp_min_size);
    app->add_flag("--sp-disable", sp_disable, "skip superpoint pooling");
    app->add_option("--threads", threads, "worker threads, 0 = all cores");
  }

  // defaults < $MVOV3D_CONFIG or --config < --dataset < explicit flags
  PipelineConfig Resolve(std::string* profile_used) const {
    PipelineConfig c;
    std::string path = config_path;
    if (path.empty()) {
      if (const char* env = std::getenv(kConfigEnv)) path = env;
    }
    if (!path.empty()) ApplyConfigJson(ReadJsonFile(path), c, path);
    if (profile_used) *profile_used = path;
    if (!dataset.empty()) c.delta = DatasetDelta(dataset);
    if (delta) c.delta = *delta;
    if (no_region) c.use_region = false;
    if (no_text) c.use_text = false;
    if (depth_tolerance) c.depth_tolerance = *depth_tolerance;
    if (!occlusion_mode.empty()) {
      c.occlusion.mode = fusion::ParseOcclusionMode(occlusion_mode);
    }
    if (occlusion_threshold) c.occlusion.threshold = *occlusion_threshold;
    if (sp_knn) c.superpoints.knn = *sp_knn;
    if (sp_k_param) c.superpoints.k_param = *sp_k_param;
    if (sp_min_size) c.superpoints.min_size = *sp_min_size;
    if (sp_disable) c.superpoints.enabled = false;
    if (threads) c.threads = *threads;
    c.Validate();
    return c;
  }
};

json Echo(const std::string& command, const std::vector<std::string>& argv,
          json inputs) {
  json j;
  j["tool"] = "mvov3d";
  j["version"] = MVOV3D_VERSION;
  j["command"] = command;
  j["argv"] = argv;
  j["inputs"] = std::move(inputs);
  return j;
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

std::string Num(double v) {
  std::ostringstream out;
  out << std::setprecision(10) << v;
  return out.str();
}

void WriteReport(const eval::EvalReport& report,
                 const std::vector<std::string>& names, const fs::path& csv,
                 const fs::path& summary) {
  std::ofstream out(csv);
  out << "label,name,bucket,gt_points,iou,accuracy\n";
  for (const auto& m : report.classes) {
    const std::string name =
        m.label < static_cast<std::int32_t>(names.size()) ? names[m.label] : "";
    out << m.label << ',' << CsvField(name) << ','
        << (m.bucket ? eval::ToString(*m.bucket) : "") << ',' << m.gt_points
        << ',' << Num(m.iou) << ',' << Num(m.accuracy) << '\n';
  }
  if (!out) throw Error("cannot write " + csv.string());

  json s;
  s["miou"] = report.miou;
  s["macc"] = report.macc;
  s["overall_accuracy"] = report.overall_accuracy();
  s["evaluated_points"] = report.evaluated_points;
  s["unlabeled_points"] = report.unlabeled_points;
  s["correct_points"] = report.correct_points;
  s["num_classes"] = report.classes.size();
  json buckets = json::object();
  for (const auto& [bucket, m] : report.buckets) {
    buckets[eval::ToString(bucket)] = {
        {"miou", m.miou}, {"macc", m.macc}, {"num_classes", m.num_classes}};
  }
  s["buckets"] = buckets;
  WriteJsonFile(summary, s);
}

void PrintSummary(const eval::EvalReport& report) {
  std::cout << "mIoU " << Num(report.miou) << "  mAcc " << Num(report.macc)
            << "  classes " << report.classes.size() << "  points "
            << report.evaluated_points << " (unlabeled "
            << report.unlabeled_points << ")\n";
}

// Classifies an exception into the documented exit codes.
int Report(const std::exception& e, int code) {
  std::cerr << "mvov3d: " << e.what() << '\n';
  return code;
}

template <typename Fn>
int Guard(Fn&& fn) {
  try {
    fn();
    return kExitOk;
  } catch (const ConfigError& e) {
    return Report(e, kExitValidation);
  } catch (const LoadError& e) {
    return Report(e, kExitValidation);
  } catch (const DataError& e) {
    return Report(e, kExitValidation);
  } catch (const PipelineError& e) {
    return Report(e, kExitPipeline);
  } catch (const std::exception& e) {
    return Report(e, kExitPipeline);
  }
}

io::Scene Load(const std::string& manifest, unsigned threads) {
  fs::path path = manifest;
  if (fs::is_directory(path)) path /= io::kManifestName;
  return io::LoadScene(path, threads);
}

std::vector<DenseFeatureMap> RefineAll(const io::Scene& scene,
                                       const PipelineConfig& config,
                                       std::size_t* accepted) {
  std::vector<DenseFeatureMap> maps(scene.views.size());
  std::vector<std::size_t> counts(scene.views.size(), 0);
  ParallelFor(scene.views.size(), config.threads, [&](std::size_t v) {
    auto refined = RefineView(scene.views[v], config);
    maps[v] = std::move(refined.improved);
    counts[v] = refined.accepted_texts;
  });
  *accepted = 0;
  for (std::size_t c : counts) *accepted += c;
  return maps;
}

}  // namespace

int Main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"Training-free open-vocabulary 3D segmentation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", MVOV3D_VERSION);

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic scene");
  std::uint64_t seed = 0;
  std::string out;
  synthetic::SyntheticSpec spec;
  synth->add_option("--seed", seed);
  synth->add_option("--out", out, "scene directory")->required();
  synth->add_option("--planes", spec.planes);
  synth->add_option("--points-per-plane", spec.points_per_plane);
  synth->add_option("--views", spec.views);
  synth->add_option("--sigma", spec.noise_sigma, "pixel feature noise");
  synth->add_option("--region-sigma", spec.region_noise_sigma,
                    "region embedding noise, negative = sigma / 2");
  synth->add_option("--occluders", spec.occluders);
  synth->add_flag("--occlusion-noise", spec.occlusion_noise,
                  "scale noise by inverse visibility");
  synth->add_option("--feature-dim", spec.feature_dim);
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--distractors", spec.distractors);

  // validate
  auto* validate = app.add_subcommand("validate", "load and check a scene");
  std::string manifest;
  std::string validate_out;
  validate->add_option("manifest", manifest, "manifest.json or scene dir")
      ->required();
  validate->add_option("--out", validate_out, "directory for the config echo");

  // run / fuse / superpoints share the config flags
  ConfigFlags flags;
  auto* run = app.add_subcommand("run", "end-to-end pipeline");
  run->add_option("manifest", manifest)->required();
  run->add_option("--out", out)->required();
  flags.Register(run);

  auto* fuse = app.add_subcommand("fuse", "refine views and fuse onto points");
  fuse->add_option("manifest", manifest)->required();
  fuse->add_option("--out", out)->required();
  flags.Register(fuse);

  auto* sp = app.add_subcommand("superpoints",
                                "segment the cloud, optionally pool features");
  std::string features_path, counts_path;
  sp->add_option("manifest", manifest)->required();
  sp->add_option("--out", out)->required();
  sp->add_option("--features", features_path, "point features to pool");
  sp->add_option("--counts", counts_path, "per-point view counts");
  flags.Register(sp);

  auto* query = app.add_subcommand("query", "assign labels to point features");
  query->add_option("manifest", manifest, "scene providing the label set")
      ->required();
  query->add_option("--features", features_path)->required();
  query->add_option("--counts", counts_path)->required();
  query->add_option("--out", out)->required();
  unsigned query_threads = 1;
  query->add_option("--threads", query_threads);

  auto* ev = app.add_subcommand("eval", "score predictions");
  std::string gt_path, pred_path, buckets_path, names_manifest;
  int num_classes = 0;
  std::int32_t ignore = -1;
  ev->add_option("--gt", gt_path, "int32 label tensor")->required();
  ev->add_option("--pred", pred_path, "int32 label tensor")->required();
  ev->add_option("--buckets", buckets_path, "head/common/tail JSON");
  ev->add_option("--scene", names_manifest,
                 "scene whose label set names the classes");
  ev->add_option("--num-classes", num_classes, "default: inferred");
  ev->add_option("--ignore", ignore);
  ev->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (synth->parsed()) {
    return Guard([&] {
      synthetic::GenerateSynthetic(seed, spec, out);
      json inputs = {{"seed", seed},
                     {"planes", spec.planes},
                     {"points_per_plane", spec.points_per_plane},
                     {"views", spec.views},
                     {"sigma", spec.noise_sigma},
                     {"region_sigma", spec.region_noise_sigma},
                     {"occluders", spec.occluders},
                     {"occlusion_noise", spec.occlusion_noise},
                     {"feature_dim", spec.feature_dim},
                     {"width", spec.width},
                     {"height", spec.height},
                     {"distractors", spec.distractors}};
      WriteJsonFile(fs::path(out) / kEchoName, Echo("synth", args, inputs));
      std::cout << (fs::path(out) / io::kManifestName).string() << '\n';
    });
  }

  if (validate->parsed()) {
    return Guard([&] {
      const io::Scene scene = Load(manifest, 1);
      json summary;
      summary["scene_id"] = scene.scene_id;
      summary["points"] = scene.cloud.size();
      summary["views"] = scene.views.size();
      summary["feature_dim"] = scene.feature_dim;
      summary["labels"] = scene.labels ? scene.labels->size() : 0;
      summary["has_ground_truth"] = scene.cloud.has_labels();
      std::size_t regions = 0;
      for (const auto& v : scene.views) regions += v.regions.size();
      summary["regions"] = regions;
      const json echo = Echo("validate", args, {{"manifest", manifest}});
      if (!validate_out.empty()) {
        WriteJsonFile(fs::path(validate_out) / kEchoName, echo);
      } else {
        summary["config_echo"] = echo;
      }
      std::cout << summary.dump(2) << '\n';
    });
  }

  if (run->parsed() || fuse->parsed() || sp->parsed()) {
    return Guard([&] {
      std::string profile;
      const PipelineConfig config = flags.Resolve(&profile);
      const fs::path dir = out;
      fs::create_directories(dir);
      json inputs = {{"manifest", manifest}, {"profile", profile}};
      if (!features_path.empty()) inputs["features"] = features_path;
      if (!counts_path.empty()) inputs["counts"] = counts_path;
      json echo = Echo(app.get_subcommands().front()->get_name(), args, inputs);
      echo["config"] = ConfigToJson(config);
      WriteJsonFile(dir / kEchoName, echo);

      const io::Scene scene = Load(manifest, config.threads);

      if (run->parsed()) {
        const PipelineResult result = RunPipeline(scene, config);
        io::WritePointFeatures(dir / "fused_features.mvov",
                               dir / "fused_counts.mvov", result.fused);
        io::WritePointFeatures(dir / "features.mvov", dir / "counts.mvov",
                               result.features);
        if (result.partition) {
          io::WriteLabels(dir / "superpoints.mvov", result.partition->labels);
        }
        io::WriteLabels(dir / "predictions.mvov", result.predictions);
        std::cout << "points " << scene.cloud.size() << "  views "
                  << scene.views.size() << "  accepted texts "
                  << result.accepted_texts;
        if (result.partition) {
          std::cout << "  superpoints " << result.partition->num_segments();
        }
        std::cout << '\n';
        if (result.report) {
          WriteReport(*result.report, scene.labels->names(), dir / "eval.csv",
                      dir / "eval_summary.json");
          PrintSummary(*result.report);
        }
        return;
      }

      if (fuse->parsed()) {
        std::size_t accepted = 0;
        const auto maps = RefineAll(scene, config, &accepted);
        const auto fused = fusion::FuseMultiview(
            scene.cloud, scene.views, maps, config.occlusion,
            config.depth_tolerance, config.threads);
        io::WritePointFeatures(dir / "fused_features.mvov",
                               dir / "fused_counts.mvov", fused);
        std::cout << "fused " << fused.num_valid() << " of "
                  << fused.num_points()
                  << " points, accepted texts " << accepted << '\n';
        return;
      }

      const auto partition = superpoint::ComputeSuperpoints(
          scene.cloud, config.superpoints, config.threads);
      io::WriteLabels(dir / "superpoints.mvov", partition.labels);
      std::cout << "superpoints " << partition.num_segments() << '\n';
      if (!features_path.empty()) {
        if (counts_path.empty()) {
          throw ConfigError("--features requires --counts");
        }
        const auto field = io::ReadPointFeatures(features_path, counts_path);
        const auto pooled = superpoint::PoolSuperpoints(field, partition);
        io::WritePointFeatures(dir / "features.mvov", dir / "counts.mvov",
                               pooled);
      }
    });
  }

  if (query->parsed()) {
    return Guard([&] {
      const fs::path dir = out;
      fs::create_directories(dir);
      WriteJsonFile(dir / kEchoName,
                    Echo("query", args,
                         {{"manifest", manifest},
                          {"features", features_path},
                          {"counts", counts_path},
                          {"threads", query_threads}}));
      const io::Scene scene = Load(manifest, query_threads);
      if (!scene.labels) throw LoadError(manifest + ": no label set");
      const auto field = io::ReadPointFeatures(features_path, counts_path);
      const auto predictions =
          eval::AssignLabels(field, *scene.labels, query_threads);
      io::WriteLabels(dir / "predictions.mvov", predictions);
      std::cout << "labelled " << predictions.size() << " points\n";
    });
  }

  if (ev->parsed()) {
    return Guard([&] {
      const fs::path dir = out;
      fs::create_directories(dir);
      WriteJsonFile(dir / kEchoName,
                    Echo("eval", args,
                         {{"gt", gt_path},
                          {"pred", pred_path},
                          {"buckets", buckets_path},
                          {"scene", names_manifest},
                          {"num_classes", num_classes},
                          {"ignore", ignore}}));
      const auto gt = io::ReadLabels(gt_path);
      const auto pred = io::ReadLabels(pred_path);
      if (gt.size() != pred.size()) {
        throw LoadError(gt_path + " has " + std::to_string(gt.size()) +
                        " labels but " + pred_path + " has " +
                        std::to_string(pred.size()));
      }
      std::vector<std::string> names;
      if (!names_manifest.empty()) {
        const io::Scene scene = Load(names_manifest, 1);
        if (scene.labels) {
          names = scene.labels->names();
          if (num_classes == 0) num_classes = static_cast<int>(names.size());
        }
      }
      if (num_classes == 0) {
        for (std::int32_t v : gt) num_classes = std::max(num_classes, v + 1);
        for (std::int32_t v : pred) num_classes = std::max(num_classes, v + 1);
      }
      eval::BucketMap buckets;
      if (!buckets_path.empty()) {
        buckets = io::LoadBucketFile(buckets_path, names.empty() ? nullptr : &names);
      }
      const auto confusion =
          eval::ComputeConfusion(pred, gt, num_classes, ignore);
      const auto report = eval::ComputeMetrics(confusion, buckets);
      WriteReport(report, names, dir / "eval.csv", dir / "eval_summary.json");
      PrintSummary(report);
    });
  }
  return kExitValidation;
}

}  // namespace mvov3d::cli

int main(int argc, char** argv) { return mvov3d::cli::Main(argc, argv); }
