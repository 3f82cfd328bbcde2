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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "mvov3d/errors.h"
#include "test_util.h"

namespace mvov3d::eval {
namespace {

using testing::RandomVector;
using testing::Rng;

LabelSet RandomLabels(Rng& rng, int count, int dim, BucketMap buckets = {}) {
  std::vector<std::string> names;
  std::vector<float> embeddings;
  for (int l = 0; l < count; ++l) {
    names.push_back("class" + std::to_string(l));
    const auto e = RandomVector(rng, dim);
    embeddings.insert(embeddings.end(), e.begin(), e.end());
  }
  return LabelSet(names, dim, embeddings, std::move(buckets));
}

TEST(AssignLabelsTest, MatchesCosineArgmaxOracle) {
  Rng rng(1);
  const int dim = 6;
  const LabelSet labels = RandomLabels(rng, 7, dim);
  PointFeatureField field(300, dim);
  std::bernoulli_distribution valid(0.8);
  for (std::size_t i = 0; i < 300; ++i) {
    const auto v = RandomVector(rng, dim, 0.1 + i % 5);
    std::copy(v.begin(), v.end(), field.row(i).begin());
    field.set_count(i, valid(rng) ? 1 : 0);
  }
  const auto assigned = AssignLabels(field, labels, 3);
  for (std::size_t i = 0; i < 300; ++i) {
    if (!field.valid(i)) {
      EXPECT_EQ(assigned[i], -1);
      continue;
    }
    int best = 0;
    double best_score = -2.0;
    for (std::size_t l = 0; l < labels.size(); ++l) {
      double dot = 0, nf = 0, ne = 0;
      for (int k = 0; k < dim; ++k) {
        dot += static_cast<double>(field.row(i)[k]) * labels.embedding(l)[k];
        nf += static_cast<double>(field.row(i)[k]) * field.row(i)[k];
        ne += static_cast<double>(labels.embedding(l)[k]) * labels.embedding(l)[k];
      }
      const double score = dot / std::sqrt(nf * ne);
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(l);
      }
    }
    EXPECT_EQ(assigned[i], best) << "point " << i;
  }
}

TEST(AssignLabelsTest, ZeroFeatureAndTiesAndScale) {
  const LabelSet labels({"a", "b"}, 2, {1.0f, 0.0f, 0.0f, 5.0f});
  PointFeatureField field(3, 2, {0.0f, 0.0f, 1.0f, 1.0f, 0.1f, 3.0f},
                          {1, 1, 1});
  const auto assigned = AssignLabels(field, labels);
  EXPECT_EQ(assigned[0], -1);  // all-zero feature
  EXPECT_EQ(assigned[1], 0);   // exact tie goes to the lower index
  EXPECT_EQ(assigned[2], 1);
}

TEST(AssignLabelsTest, DimensionMismatchIsConfigError) {
  const LabelSet labels({"a"}, 2, {1.0f, 0.0f});
  EXPECT_THROW(AssignLabels(PointFeatureField(4, 3), labels), ConfigError);
}

TEST(LabelSetTest, RejectsInvalidContents) {
  EXPECT_THROW(LabelSet({"a", "a"}, 1, {1.0f, 1.0f}), DataError);
  EXPECT_THROW(LabelSet({"a"}, 2, {0.0f, 0.0f}), DataError);
  EXPECT_THROW(LabelSet({"a"}, 2, {1.0f}), DataError);
  EXPECT_THROW(LabelSet({"a", "b"}, 1, {1.0f, 1.0f}, {}, 1), DataError);
  EXPECT_THROW(LabelSet({"a"}, 1, {1.0f}, {{3, Bucket::kHead}}), DataError);
}

TEST(MetricsTest, HandTalliedTenPoints) {
  const std::vector<std::int32_t> gt = {0, 0, 0, 0, 1, 1, 1, 1, 2, 2};
  const std::vector<std::int32_t> pred = {0, 0, 1, 2, 1, 1, 0, 0, 2, -1};
  const auto confusion = ComputeConfusion(pred, gt, 3, -1);
  EXPECT_EQ(confusion.total(), 10u);
  EXPECT_EQ(confusion.unlabeled(2), 1u);
  const BucketMap buckets = {
      {0, Bucket::kHead}, {1, Bucket::kCommon}, {2, Bucket::kTail}};
  const auto report = ComputeMetrics(confusion, buckets);
  ASSERT_EQ(report.classes.size(), 3u);
  // Class 0 is half right: TP 2, FN 2, FP 2.
  EXPECT_NEAR(report.classes[0].iou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.classes[0].accuracy, 0.5, 1e-12);
  EXPECT_NEAR(report.classes[1].iou, 2.0 / 5.0, 1e-12);
  EXPECT_NEAR(report.classes[1].accuracy, 0.5, 1e-12);
  EXPECT_NEAR(report.classes[2].iou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.classes[2].accuracy, 0.5, 1e-12);
  EXPECT_NEAR(report.miou, 16.0 / 45.0, 1e-12);
  EXPECT_NEAR(report.macc, 0.5, 1e-12);
  EXPECT_NEAR(report.buckets.at(Bucket::kHead).miou, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(report.buckets.at(Bucket::kCommon).miou, 2.0 / 5.0, 1e-12);
  EXPECT_EQ(report.buckets.at(Bucket::kTail).num_classes, 1u);
  EXPECT_EQ(report.evaluated_points, 10u);
  EXPECT_EQ(report.unlabeled_points, 1u);
  EXPECT_EQ(report.correct_points, 5u);
}

TEST(MetricsTest, PerfectPredictionScoresOne) {
  const std::vector<std::int32_t> gt = {0, 1, 2, 2, 1, 0, -1};
  const auto report = ComputeMetrics(ComputeConfusion(gt, gt, 4, -1));
  EXPECT_EQ(report.classes.size(), 3u);  // class 3 absent from ground truth
  EXPECT_DOUBLE_EQ(report.miou, 1.0);
  EXPECT_DOUBLE_EQ(report.macc, 1.0);
  EXPECT_DOUBLE_EQ(report.overall_accuracy(), 1.0);
}

TEST(MetricsTest, MatchesPerClassCountingOracle) {
  Rng rng(2);
  std::uniform_int_distribution<int> label(-1, 5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 200, classes = 6;
    std::vector<std::int32_t> gt(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gt[i] = label(rng);
      pred[i] = label(rng);
    }
    const auto report = ComputeMetrics(ComputeConfusion(pred, gt, classes, -1));
    double miou = 0, macc = 0;
    int present = 0;
    std::size_t next = 0;
    for (int c = 0; c < classes; ++c) {
      int tp = 0, fp = 0, fn = 0;
      for (int i = 0; i < n; ++i) {
        if (gt[i] == -1) continue;
        if (gt[i] == c && pred[i] == c) ++tp;
        if (gt[i] == c && pred[i] != c) ++fn;
        if (gt[i] != c && pred[i] == c) ++fp;
      }
      if (tp + fn == 0) continue;
      ++present;
      const double iou = static_cast<double>(tp) / (tp + fp + fn);
      const double acc = static_cast<double>(tp) / (tp + fn);
      ASSERT_LT(next, report.classes.size());
      EXPECT_EQ(report.classes[next].label, c);
      EXPECT_NEAR(report.classes[next].iou, iou, 1e-12);
      EXPECT_NEAR(report.classes[next].accuracy, acc, 1e-12);
      ++next;
      miou += iou;
      macc += acc;
    }
    EXPECT_NEAR(report.miou, miou / present, 1e-12);
    EXPECT_NEAR(report.macc, macc / present, 1e-12);
    EXPECT_GE(report.miou, 0.0);
    EXPECT_LE(report.miou, 1.0);
  }
}

TEST(MetricsTest, ConfusionMergeAddsCounts) {
  const std::vector<std::int32_t> gt = {0, 1, 1};
  const std::vector<std::int32_t> pred = {1, 1, -1};
  auto a = ComputeConfusion(pred, gt, 2, -1);
  a.Merge(ComputeConfusion(pred, gt, 2, -1));
  EXPECT_EQ(a.at(0, 1), 2u);
  EXPECT_EQ(a.at(1, 1), 2u);
  EXPECT_EQ(a.unlabeled(1), 2u);
  EXPECT_THROW(a.Merge(ConfusionMatrix(3)), ConfigError);
}

TEST(MetricsTest, RejectsBadInputs) {
  const std::vector<std::int32_t> three = {0, 1, 2};
  const std::vector<std::int32_t> two = {0, 1};
  EXPECT_THROW(ComputeConfusion(three, two, 3, -1), ConfigError);
  EXPECT_THROW(ComputeConfusion(three, three, 2, -1), DataError);
  EXPECT_THROW(ComputeConfusion(three, three, 3, 1), ConfigError);
  const auto confusion = ComputeConfusion(three, three, 3, -1);
  EXPECT_THROW(ComputeMetrics(confusion, {{0, Bucket::kHead}}), DataError);
}

TEST(BucketTest, ParsesAndPrints) {
  for (Bucket b : {Bucket::kHead, Bucket::kCommon, Bucket::kTail}) {
    EXPECT_EQ(ParseBucket(ToString(b)), b);
  }
  EXPECT_THROW(ParseBucket("rare"), DataError);
}

}  // namespace
}  // namespace mvov3d::eval
