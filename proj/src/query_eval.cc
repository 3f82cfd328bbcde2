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

#include "mvov3d/query_eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <utility>

#include "mvov3d/errors.h"
#include "mvov3d/parallel.h"

namespace mvov3d::eval {

std::string ToString(Bucket bucket) {
  switch (bucket) {
    case Bucket::kHead:
      return "head";
    case Bucket::kCommon:
      return "common";
    case Bucket::kTail:
      return "tail";
  }
  return "unknown";
}

Bucket ParseBucket(const std::string& name) {
  if (name == "head") return Bucket::kHead;
  if (name == "common") return Bucket::kCommon;
  if (name == "tail") return Bucket::kTail;
  throw DataError("unknown bucket '" + name + "'");
}

LabelSet::LabelSet(std::vector<std::string> names, int dim,
                   std::vector<float> embeddings, BucketMap buckets,
                   std::int32_t ignore_label)
    : names_(std::move(names)),
      dim_(dim),
      embeddings_(std::move(embeddings)),
      buckets_(std::move(buckets)),
      ignore_label_(ignore_label) {
  const std::size_t count = names_.size();
  if (dim <= 0 || embeddings_.size() != count * dim) {
    throw DataError("label embeddings hold " +
                    std::to_string(embeddings_.size()) + " values for " +
                    std::to_string(count) + " labels of dim " +
                    std::to_string(dim));
  }
  std::set<std::string> seen;
  for (const std::string& name : names_) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate label name '" + name + "'");
    }
  }
  for (std::size_t l = 0; l < count; ++l) {
    double norm2 = 0.0;
    for (float v : embedding(l)) {
      if (!std::isfinite(v)) {
        throw DataError("embedding of '" + names_[l] + "' is not finite");
      }
      norm2 += static_cast<double>(v) * v;
    }
    if (norm2 == 0.0) {
      throw DataError("embedding of '" + names_[l] + "' is zero");
    }
  }
  if (ignore_label_ >= 0 && static_cast<std::size_t>(ignore_label_) < count) {
    throw DataError("ignore label " + std::to_string(ignore_label_) +
                    " collides with a class index");
  }
  for (const auto& [label, bucket] : buckets_) {
    if (label < 0 || static_cast<std::size_t>(label) >= count) {
      throw DataError("bucket map names unknown label " +
                      std::to_string(label));
    }
  }
}

std::vector<std::int32_t> AssignLabels(const PointFeatureField& features,
                                       const LabelSet& labels,
                                       unsigned threads) {
  if (features.dim() != labels.dim()) {
    throw ConfigError("feature dim " + std::to_string(features.dim()) +
                      " differs from label embedding dim " +
                      std::to_string(labels.dim()));
  }
  const int dim = labels.dim();
  // The point norm is shared by every label, so ranking by
  // dot / |label| is the cosine ranking.
  std::vector<double> inverse_norms(labels.size());
  for (std::size_t l = 0; l < labels.size(); ++l) {
    double norm2 = 0.0;
    for (float v : labels.embedding(l)) norm2 += static_cast<double>(v) * v;
    inverse_norms[l] = 1.0 / std::sqrt(norm2);
  }
  std::vector<std::int32_t> assigned(features.num_points(),
                                     labels.ignore_label());
  ParallelFor(features.num_points(), threads, [&](std::size_t i) {
    if (!features.valid(i)) return;
    const auto f = features.row(i);
    if (std::all_of(f.begin(), f.end(), [](float v) { return v == 0.0f; })) {
      return;
    }
    double best = -std::numeric_limits<double>::infinity();
    std::int32_t best_label = labels.ignore_label();
    for (std::size_t l = 0; l < labels.size(); ++l) {
      const auto e = labels.embedding(l);
      double dot = 0.0;
      for (int k = 0; k < dim; ++k) dot += static_cast<double>(f[k]) * e[k];
      const double score = dot * inverse_norms[l];
      if (score > best) {
        best = score;
        best_label = static_cast<std::int32_t>(l);
      }
    }
    assigned[i] = best_label;
  });
  return assigned;
}

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<std::size_t>(num_classes) * (num_classes + 1), 0) {
  if (num_classes < 0) throw ConfigError("negative class count");
}

std::uint64_t ConfusionMatrix::row_total(int gt) const {
  std::uint64_t total = 0;
  for (int p = 0; p <= num_classes_; ++p) total += at(gt, p);
  return total;
}

std::uint64_t ConfusionMatrix::column_total(int pred) const {
  std::uint64_t total = 0;
  for (int g = 0; g < num_classes_; ++g) total += at(g, pred);
  return total;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t total = 0;
  for (std::uint64_t c : counts_) total += c;
  return total;
}

void ConfusionMatrix::Merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw ConfigError("cannot merge confusion matrices of different sizes");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    counts_[i] += other.counts_[i];
  }
}

ConfusionMatrix ComputeConfusion(std::span<const std::int32_t> pred,
                                 std::span<const std::int32_t> gt,
                                 int num_classes, std::int32_t ignore) {
  if (pred.size() != gt.size()) {
    throw ConfigError("prediction length " + std::to_string(pred.size()) +
                      " differs from ground truth length " +
                      std::to_string(gt.size()));
  }
  if (ignore >= 0 && ignore < num_classes) {
    throw ConfigError("ignore label collides with a class index");
  }
  auto in_range = [num_classes](std::int32_t label) {
    return label >= 0 && label < num_classes;
  };
  ConfusionMatrix confusion(num_classes);
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt[i] != ignore && !in_range(gt[i])) {
      throw DataError("ground-truth label " + std::to_string(gt[i]) +
                      " at point " + std::to_string(i) + " is out of range");
    }
    if (pred[i] != ignore && !in_range(pred[i])) {
      throw DataError("predicted label " + std::to_string(pred[i]) +
                      " at point " + std::to_string(i) + " is out of range");
    }
    if (gt[i] == ignore) continue;
    if (pred[i] == ignore) {
      ++confusion.unlabeled(gt[i]);
    } else {
      ++confusion.at(gt[i], pred[i]);
    }
  }
  return confusion;
}

EvalReport ComputeMetrics(const ConfusionMatrix& confusion,
                          const BucketMap& buckets) {
  EvalReport report;
  const int n = confusion.num_classes();
  std::map<Bucket, std::pair<double, double>> bucket_sums;
  for (int c = 0; c < n; ++c) {
    const std::uint64_t gt_points = confusion.row_total(c);
    report.evaluated_points += gt_points;
    report.unlabeled_points += confusion.unlabeled(c);
    report.correct_points += confusion.at(c, c);
    if (gt_points == 0) continue;
    const std::uint64_t tp = confusion.at(c, c);
    const std::uint64_t fn = gt_points - tp;
    const std::uint64_t fp = confusion.column_total(c) - tp;
    ClassMetrics metrics;
    metrics.label = c;
    metrics.gt_points = gt_points;
    metrics.iou = static_cast<double>(tp) / static_cast<double>(tp + fp + fn);
    metrics.accuracy = static_cast<double>(tp) / static_cast<double>(tp + fn);
    if (!buckets.empty()) {
      const auto it = buckets.find(c);
      if (it == buckets.end()) {
        throw DataError("class " + std::to_string(c) +
                        " occurs in ground truth but has no bucket");
      }
      metrics.bucket = it->second;
      auto& [iou_sum, acc_sum] = bucket_sums[it->second];
      iou_sum += metrics.iou;
      acc_sum += metrics.accuracy;
      ++report.buckets[it->second].num_classes;
    }
    report.miou += metrics.iou;
    report.macc += metrics.accuracy;
    report.classes.push_back(metrics);
  }
  if (!report.classes.empty()) {
    report.miou /= static_cast<double>(report.classes.size());
    report.macc /= static_cast<double>(report.classes.size());
  }
  for (auto& [bucket, metrics] : report.buckets) {
    const auto& [iou_sum, acc_sum] = bucket_sums[bucket];
    metrics.miou = iou_sum / static_cast<double>(metrics.num_classes);
    metrics.macc = acc_sum / static_cast<double>(metrics.num_classes);
  }
  return report;
}

}  // namespace mvov3d::eval
