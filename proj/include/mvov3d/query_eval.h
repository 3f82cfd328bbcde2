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

#ifndef MVOV3D_QUERY_EVAL_H_
#define MVOV3D_QUERY_EVAL_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvov3d/feature_map.h"

namespace mvov3d::eval {

enum class Bucket { kHead, kCommon, kTail };

std::string ToString(Bucket bucket);
// Accepts "head", "common" and "tail".
Bucket ParseBucket(const std::string& name);

// Label index -> frequency bucket.
using BucketMap = std::map<std::int32_t, Bucket>;

// Open-vocabulary classes with one text embedding each.
class LabelSet {
 public:
  LabelSet() = default;
  // Throws DataError on duplicate names, zero or non-finite embeddings, an
  // ignore label inside [0, L), or buckets naming unknown labels.
  LabelSet(std::vector<std::string> names, int dim,
           std::vector<float> embeddings, BucketMap buckets = {},
           std::int32_t ignore_label = -1);

  std::size_t size() const { return names_.size(); }
  int dim() const { return dim_; }
  const std::vector<std::string>& names() const { return names_; }
  std::span<const float> embedding(std::size_t label) const {
    return {embeddings_.data() + label * dim_, static_cast<std::size_t>(dim_)};
  }
  const std::vector<float>& embeddings() const { return embeddings_; }
  const BucketMap& buckets() const { return buckets_; }
  std::int32_t ignore_label() const { return ignore_label_; }

 private:
  std::vector<std::string> names_;
  int dim_ = 0;
  std::vector<float> embeddings_;
  BucketMap buckets_;
  std::int32_t ignore_label_ = -1;
};

// Valid points get the label whose embedding has the highest cosine
// similarity with their feature (lowest label index on ties). Invalid
// points, and valid points with an all-zero feature, get the ignore label.
// Throws ConfigError on a dimension mismatch.
std::vector<std::int32_t> AssignLabels(const PointFeatureField& features,
                                       const LabelSet& labels,
                                       unsigned threads = 1);

// Rows are ground-truth classes, columns predicted classes plus a final
// column for points predicted as the ignore label (unlabeled).
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes = 0);

  int num_classes() const { return num_classes_; }
  std::uint64_t at(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * (num_classes_ + 1) + pred];
  }
  std::uint64_t& at(int gt, int pred) {
    return counts_[static_cast<std::size_t>(gt) * (num_classes_ + 1) + pred];
  }
  std::uint64_t unlabeled(int gt) const { return at(gt, num_classes_); }
  std::uint64_t& unlabeled(int gt) { return at(gt, num_classes_); }
  std::uint64_t row_total(int gt) const;
  std::uint64_t column_total(int pred) const;
  std::uint64_t total() const;
  void Merge(const ConfusionMatrix& other);

 private:
  int num_classes_ = 0;
  std::vector<std::uint64_t> counts_;
};

// Counts every point whose ground truth is not `ignore`. A prediction equal
// to `ignore` lands in the unlabeled column. Throws ConfigError on a length
// mismatch and DataError on a label outside [0, L) other than `ignore`.
ConfusionMatrix ComputeConfusion(std::span<const std::int32_t> pred,
                                 std::span<const std::int32_t> gt,
                                 int num_classes, std::int32_t ignore);

struct ClassMetrics {
  std::int32_t label = 0;
  double iou = 0.0;       // TP / (TP + FP + FN)
  double accuracy = 0.0;  // TP / (TP + FN)
  std::uint64_t gt_points = 0;
  std::optional<Bucket> bucket;
};

struct BucketMetrics {
  double miou = 0.0;
  double macc = 0.0;
  std::size_t num_classes = 0;
};

// All metrics are fractions in [0, 1].
struct EvalReport {
  std::vector<ClassMetrics> classes;  // only classes present in ground truth
  double miou = 0.0;
  double macc = 0.0;
  std::map<Bucket, BucketMetrics> buckets;
  std::uint64_t evaluated_points = 0;
  std::uint64_t unlabeled_points = 0;
  std::uint64_t correct_points = 0;

  // Point-level accuracy over evaluated points.
  double overall_accuracy() const {
    return evaluated_points == 0
               ? 0.0
               : static_cast<double>(correct_points) / evaluated_points;
  }
};

// Per-class IoU and accuracy, averaged over classes present in ground
// truth. With a non-empty bucket map every evaluated class must be bucketed
// (DataError otherwise); bucket means cover the classes in each bucket.
EvalReport ComputeMetrics(const ConfusionMatrix& confusion,
                          const BucketMap& buckets = {});

}  // namespace mvov3d::eval

#endif  // MVOV3D_QUERY_EVAL_H_
