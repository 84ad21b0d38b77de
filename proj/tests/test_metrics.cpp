/*
 * Copyright 2026 The ORVOS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "orvos/errors.hpp"
#include "orvos/metrics.hpp"

namespace orvos {
namespace {

BinaryMask mask_from(std::size_t h, std::size_t w, std::initializer_list<std::pair<int, int>> cells) {
  BinaryMask m(h, w);
  for (auto [y, x] : cells) m.at(y, x) = 1;
  return m;
}

using testing::boundary_f_oracle;
using testing::iou_oracle;

TEST(RegionSimilarity, Examples) {
  BinaryMask gt(4, 4), pred(4, 4);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 4; ++x) {
      gt.at(y, x) = 1;
      pred.at(y, x) = x < 2;
    }
  EXPECT_DOUBLE_EQ(region_similarity(pred, gt), 0.5);
  EXPECT_DOUBLE_EQ(region_similarity(BinaryMask(4, 4), BinaryMask(4, 4)), 1.0);
  EXPECT_DOUBLE_EQ(region_similarity(pred, BinaryMask(4, 4)), 0.0);
  EXPECT_DOUBLE_EQ(region_similarity(BinaryMask(4, 4), pred), 0.0);
  EXPECT_THROW(region_similarity(BinaryMask(4, 4), BinaryMask(4, 5)), ShapeError);
}

TEST(BoundaryF, Examples) {
  const BinaryMask a = mask_from(8, 8, {{2, 2}});
  const BinaryMask b = mask_from(8, 8, {{2, 5}});
  EXPECT_DOUBLE_EQ(boundary_f(a, a, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(boundary_f(a, b, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(boundary_f(a, b, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(boundary_f(BinaryMask(8, 8), BinaryMask(8, 8), 1.0), 1.0);
  EXPECT_DOUBLE_EQ(boundary_f(a, BinaryMask(8, 8), 1.0), 0.0);
  EXPECT_THROW(boundary_f(a, b, -1.0), InvalidArgument);
}

TEST(BoundaryF, InteriorCellsAreNotBoundary) {
  BinaryMask m(5, 5);
  for (std::size_t y = 1; y < 4; ++y)
    for (std::size_t x = 1; x < 4; ++x) m.at(y, x) = 1;
  const BinaryMask b = boundary_cells(m);
  EXPECT_EQ(b.area(), 8u);
  EXPECT_EQ(b.at(2, 2), 0);
  BinaryMask full(3, 3);
  for (auto& c : full.cells) c = 1;
  EXPECT_EQ(boundary_cells(full).area(), 8u);  // frame border counts as outside
}

TEST(BoundaryF, DefaultRadius) {
  EXPECT_DOUBLE_EQ(default_boundary_radius(32, 32), 1.0);
  EXPECT_DOUBLE_EQ(default_boundary_radius(480, 854), 8.0);
}

TEST(Metrics, MatchBruteForceOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t h = 3 + rng() % 14, w = 3 + rng() % 14;
    const BinaryMask p = testing::random_mask_mix(h, w, rng), g = testing::random_mask_mix(h, w, rng);
    const double r = static_cast<double>(rng() % 4) + (rng() % 2 ? 0.5 : 0.0);
    ASSERT_NEAR(region_similarity(p, g), iou_oracle(p, g), 1e-12);
    ASSERT_NEAR(boundary_f(p, g, r), boundary_f_oracle(p, g, r), 1e-12) << i;
    // Symmetric in its arguments, and in [0, 1].
    ASSERT_NEAR(boundary_f(p, g, r), boundary_f(g, p, r), 1e-12);
    ASSERT_GE(boundary_f(p, g, r), 0.0);
    ASSERT_LE(boundary_f(p, g, r), 1.0);
    // A wider tolerance never lowers the score.
    ASSERT_LE(boundary_f(p, g, r), boundary_f(p, g, r + 1.0) + 1e-12);
  }
}

AnnotatedSample sample_with(std::string id, std::vector<BinaryMask> gt, Category cat = Category::kAttribute) {
  AnnotatedSample s;
  s.video_id = std::move(id);
  s.length = gt.size();
  s.height = gt[0].height;
  s.width = gt[0].width;
  s.frames.assign(s.length, Frame(s.height, s.width));
  AnnotatedQuery q;
  q.spec = {"q0", "the red square", cat};
  q.masks = std::move(gt);
  s.queries.push_back(q);
  return s;
}

TEST(ScoreCorpus, HalfEmptyQuery) {
  const BinaryMask obj = mask_from(8, 8, {{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  const Corpus corpus{sample_with("v", {obj, BinaryMask(8, 8)})};
  PredictionSet preds{{"v", {"v", 2, 8, 8, {{"q0", {obj, obj}}}}}};
  const MetricReport r = score_corpus(corpus, preds);
  EXPECT_DOUBLE_EQ(r.overall.j, 0.5);
  EXPECT_DOUBLE_EQ(r.overall.f, 0.5);
  EXPECT_DOUBLE_EQ(r.overall.jf, 0.5);
  EXPECT_EQ(r.categories[0].queries, 1u);
  EXPECT_EQ(r.categories[1].queries, 0u);
}

TEST(ScoreCorpus, AveragesQueriesNotFrames) {
  const BinaryMask obj = mask_from(8, 8, {{1, 1}});
  // Video a: 1 frame, perfect. Video b: 3 frames, all wrong.
  const Corpus corpus{sample_with("a", {obj}, Category::kSpatial),
                      sample_with("b", {obj, obj, obj}, Category::kAction)};
  const BinaryMask none(8, 8);
  PredictionSet preds{{"a", {"a", 1, 8, 8, {{"q0", {obj}}}}}, {"b", {"b", 3, 8, 8, {{"q0", {none, none, none}}}}}};
  const MetricReport r = score_corpus(corpus, preds);
  EXPECT_DOUBLE_EQ(r.overall.jf, 0.5);
  EXPECT_DOUBLE_EQ(r.categories[static_cast<std::size_t>(Category::kSpatial)].jf, 1.0);
  EXPECT_DOUBLE_EQ(r.categories[static_cast<std::size_t>(Category::kAction)].jf, 0.0);
  ASSERT_EQ(r.queries.size(), 2u);
  EXPECT_EQ(r.queries[1].video_id, "b");
}

TEST(ScoreCorpus, MissingPredictionsAreCoverageErrors) {
  const BinaryMask obj = mask_from(8, 8, {{1, 1}});
  const Corpus corpus{sample_with("v", {obj, obj})};
  EXPECT_THROW(score_corpus(corpus, {}), CoverageError);
  PredictionSet wrong_query{{"v", {"v", 2, 8, 8, {{"q9", {obj, obj}}}}}};
  EXPECT_THROW(score_corpus(corpus, wrong_query), CoverageError);
  PredictionSet short_run{{"v", {"v", 1, 8, 8, {{"q0", {obj}}}}}};
  EXPECT_THROW(score_corpus(corpus, short_run), CoverageError);
  PredictionSet wrong_shape{{"v", {"v", 2, 4, 4, {{"q0", {BinaryMask(4, 4), BinaryMask(4, 4)}}}}}};
  EXPECT_THROW(score_corpus(corpus, wrong_shape), CoverageError);
}

TEST(ShiftWindow, SplitsFramesAroundRecordEdges) {
  const BinaryMask obj = mask_from(8, 8, {{1, 1}});
  const BinaryMask none(8, 8);
  std::vector<BinaryMask> gt(10, none);
  for (int t = 4; t < 6; ++t) gt[t] = obj;
  Corpus corpus{sample_with("v", gt)};
  corpus[0].queries[0].shifts = {{1, 5, 6}};
  // Predict nothing: frames 5 and 6 score 0, the rest 1.
  PredictionSet preds{{"v", {"v", 10, 8, 8, {{"q0", std::vector<BinaryMask>(10, none)}}}}};

  const ShiftWindowReport w1 = shift_window_report(corpus, preds, 1);
  EXPECT_EQ(w1.boundary_frames, 4u);  // frames 4..7
  EXPECT_EQ(w1.off_boundary_frames, 6u);
  EXPECT_DOUBLE_EQ(w1.boundary.jf, 0.5);
  EXPECT_DOUBLE_EQ(w1.off_boundary.jf, 1.0);

  // A window covering the whole video reduces to the overall score.
  const ShiftWindowReport all = shift_window_report(corpus, preds, 10);
  EXPECT_EQ(all.off_boundary_frames, 0u);
  EXPECT_DOUBLE_EQ(all.boundary.jf, score_corpus(corpus, preds).overall.jf);
  EXPECT_EQ(all.off_boundary.queries, 0u);
}

TEST(Reports, CsvLayouts) {
  const BinaryMask obj = mask_from(8, 8, {{1, 1}});
  const Corpus corpus{sample_with("v", {obj, BinaryMask(8, 8)})};
  PredictionSet preds{{"v", {"v", 2, 8, 8, {{"q0", {obj, obj}}}}}};
  const MetricReport r = score_corpus(corpus, preds);
  EXPECT_EQ(report_csv(r, false), "scope,category,J,F,JF\noverall,all,0.500000,0.500000,0.500000\n");
  EXPECT_EQ(report_csv(r, true),
            "scope,category,J,F,JF\noverall,all,0.500000,0.500000,0.500000\n"
            "category,attribute,0.500000,0.500000,0.500000\n");
  const ShiftWindowReport w = shift_window_report(corpus, preds, 1);
  EXPECT_NE(report_csv(r, false, &w).find("shift_window_1,boundary,"), std::string::npos);

  const std::string table = category_table_csv(r);
  EXPECT_EQ(table.substr(0, table.find('\n')), "metric,Attr.,Spatial,Action,Interact.,Ext. Know.,Overall");
  EXPECT_NE(table.find("\nJF,0.500000,,,,,0.500000\n"), std::string::npos) << table;
  EXPECT_EQ(category_table_line(r), "Attr. 50.0  Spatial -  Action -  Interact. -  Ext. Know. -  | J 50.0  F 50.0  J&F 50.0");
  const std::string svg = report_svg(r);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("Overall"), std::string::npos);
}

}  // namespace
}  // namespace orvos
