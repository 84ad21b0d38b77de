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

#include <random>
#include <set>

#include "orvos/errors.hpp"
#include "orvos/generator.hpp"
#include "orvos/grad_check.hpp"
#include "orvos/memory_aggregator.hpp"
#include "orvos/reasoner.hpp"
#include "test_support.hpp"

namespace orvos {
namespace {

using testing::random_matrix;

Frame random_frame(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(0, 8);
  Frame f(h, w);
  for (auto& v : f.cells) v = static_cast<std::uint8_t>(c(rng));
  return f;
}

TEST(EncodeFrame, MatchesHandComputedProjection) {
  Model m = Model::create(testing::tiny_config(), 1);
  std::mt19937_64 rng(4);
  const Frame f = random_frame(4, 4, rng);
  Matrix& w = m.params.at("reasoner.frame.w").value;
  Matrix& b = m.params.at("reasoner.frame.b").value;
  w = random_matrix(w.rows(), w.cols(), rng);
  b = random_matrix(1, b.cols(), rng);
  const SceneFeatures s = encode_frame(m, f);
  ASSERT_EQ(s.cells.rows(), 16u);
  const std::size_t regions = m.config.region_count();
  const double coord[] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) {
      for (std::size_t k = 0; k < m.config.visual_dim; ++k) {
        double v = b(0, k) + coord[x] * w(regions, k) + coord[y] * w(regions + 1, k);
        if (f.at(y, x) > 0) v += w(f.at(y, x) - 1, k);
        EXPECT_NEAR(s.cells(y * 4 + x, k), v, 1e-13);
      }
    }
  }
  // Pooled is the cell mean; region rows average the cells of each colour.
  for (std::size_t k = 0; k < m.config.visual_dim; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 16; ++i) mean += s.cells(i, k) / 16.0;
    EXPECT_NEAR(s.pooled(0, k), mean, 1e-13);
  }
  for (std::size_t r = 0; r < regions; ++r) {
    double count = 0.0;
    std::vector<double> acc(m.config.visual_dim);
    for (std::size_t i = 0; i < 16; ++i) {
      if (f.cells[i] != r + 1) continue;
      count += 1.0;
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += s.cells(i, k);
    }
    for (std::size_t k = 0; k < acc.size(); ++k) {
      EXPECT_NEAR(s.regions(r, k), count ? acc[k] / count : 0.0, 1e-13);
    }
    EXPECT_NEAR(s.regions(r, m.config.visual_dim), count / 16.0, 1e-15);
  }
}

TEST(EncodeFrame, BlankFrameCarriesOnlyCoordinates) {
  Model m = Model::create(testing::tiny_config(), 2);
  const SceneFeatures s = encode_frame(m, Frame(3, 3));
  const Matrix& w = m.params.at("reasoner.frame.w").value;
  const std::size_t regions = m.config.region_count();
  // The centre cell sits at coordinate (0, 0).
  for (std::size_t k = 0; k < m.config.visual_dim; ++k) EXPECT_EQ(s.cells(4, k), 0.0);
  for (std::size_t k = 0; k < m.config.visual_dim; ++k) {
    EXPECT_NEAR(s.cells(0, k), -w(regions, k) - w(regions + 1, k), 1e-14);
  }
  for (double v : s.regions.values()) EXPECT_EQ(v, 0.0);
}

TEST(EncodeFrame, DeterministicAndValidated) {
  const Model m = Model::create(testing::tiny_config(), 3);
  std::mt19937_64 rng(1);
  const Frame f = random_frame(6, 6, rng);
  EXPECT_EQ(encode_frame(m, f), encode_frame(m, f));
  Frame bad = f;
  bad.cells[3] = 9;
  EXPECT_THROW(encode_frame(m, bad), ShapeError);
  ModelConfig strided = testing::tiny_config();
  strided.feature_stride = 4;
  const Model ms = Model::create(strided, 3);
  EXPECT_THROW(encode_frame(ms, f), ShapeError);
  const SceneFeatures sf = encode_frame(ms, random_frame(8, 8, rng));
  EXPECT_EQ(sf.grid_height, 2u);
  EXPECT_EQ(sf.cells.rows(), 4u);
}

TEST(AssemblePrompt, AnchorCounts) {
  ModelConfig c;
  const PromptAssembly cold = assemble_prompt(c, 1, c.memory_tokens);
  EXPECT_EQ(cold.context_frames(), 0u);
  EXPECT_EQ(cold.slots[cold.target_anchor].kind, SlotKind::kTargetAnchor);
  const PromptAssembly full = assemble_prompt(c, 5, c.memory_tokens);
  EXPECT_EQ(full.context_frames(), 4u);
  EXPECT_EQ(full.slots.size(), c.instruction_tokens + 1 + 5 * (c.region_count() + 1) + c.memory_tokens);
  EXPECT_THROW(assemble_prompt(c, 0, 0), InvalidArgument);
  EXPECT_THROW(assemble_prompt(c, 6, 0), InvalidArgument);
}

TEST(AssemblePrompt, LayoutOrder) {
  ModelConfig c;
  const PromptAssembly a = assemble_prompt(c, 3, 2);
  std::set<std::size_t> anchors(a.seg_anchors.begin(), a.seg_anchors.end());
  anchors.insert(a.target_anchor);
  EXPECT_EQ(anchors.size(), 3u);
  // Most recent context frame first, so positions decrease along the list.
  EXPECT_GT(a.seg_anchors[0], a.seg_anchors[1]);
  EXPECT_GT(a.target_anchor, a.seg_anchors[0]);
  EXPECT_EQ(a.slots[a.seg_anchors[0]].frame_offset, 1u);
  EXPECT_EQ(a.slots[a.seg_anchors[1]].frame_offset, 2u);
  // Each anchor follows its own frame's visual slots.
  for (std::size_t pos : anchors) {
    EXPECT_EQ(a.slots[pos - 1].kind, SlotKind::kVisual);
    EXPECT_EQ(a.slots[pos - 1].frame_offset, a.slots[pos].frame_offset);
  }
  EXPECT_EQ(a.slots.front().kind, SlotKind::kInstruction);
  EXPECT_EQ(a.slots[c.instruction_tokens].kind, SlotKind::kQuery);
  EXPECT_EQ(a.slots.back().kind, SlotKind::kMemory);
  EXPECT_EQ(a.slots[a.slots.size() - 3].kind, SlotKind::kTargetAnchor);
}

class ReasonerTest : public ::testing::Test {
 protected:
  ReasonerTest() : model(Model::create(testing::tiny_config(), 7)), rng(19) {
    for (int i = 0; i < 3; ++i) window.push_back(encode_frame(model, random_frame(6, 6, rng)));
    memory = random_matrix(2, model.config.dim, rng);
  }
  Model model;
  std::mt19937_64 rng;
  std::vector<SceneFeatures> window;
  Matrix memory;
};

TEST_F(ReasonerTest, Deterministic) {
  const ReasonerOutput a = reason_step(model, "the red square", window, memory);
  const ReasonerOutput b = reason_step(model, "the red square", window, memory);
  EXPECT_EQ(a.target_token, b.target_token);
  EXPECT_EQ(a.context_tokens, b.context_tokens);
  EXPECT_EQ(a.target_token.size(), model.config.dim);
  EXPECT_EQ(a.context_tokens.rows(), 2u);
}

double l1(const Vector& a, const Vector& b) {
  double d = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) d += std::abs(a[j] - b[j]);
  return d;
}

TEST_F(ReasonerTest, MemoryOrderAndQueryMatter) {
  Matrix swapped = memory;
  for (std::size_t j = 0; j < memory.cols(); ++j) std::swap(swapped(0, j), swapped(1, j));
  const ReasonerOutput a = reason_step(model, "the red square", window, memory);
  EXPECT_GT(l1(a.target_token, reason_step(model, "the red square", window, swapped).target_token), 1e-9);
  EXPECT_GT(l1(a.target_token, reason_step(model, "the blue square", window, memory).target_token), 1e-9);
  EXPECT_THROW(reason_step(model, "the red square", window, random_matrix(3, model.config.dim, rng)), ShapeError);
}

TEST_F(ReasonerTest, CurrentFrameMatters) {
  const ReasonerOutput a = reason_step(model, "the red square", window, memory);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<SceneFeatures> other = window;
    other.back() = encode_frame(model, random_frame(6, 6, rng));
    if (other.back() == window.back()) continue;
    EXPECT_GT(l1(a.target_token, reason_step(model, "the red square", other, memory).target_token), 1e-9);
  }
}

TEST_F(ReasonerTest, ZeroedEncoderReturnsNormalizedAnchorEmbedding) {
  testing::zero_block(model.params, "reasoner.layer0");
  const ReasonerOutput out = reason_step(model, "the red square", window, memory);
  Tape t(false);
  const Matrix q = t.value(embed_query(t, model, "the red square"));
  const Matrix& anchor = model.params.at("reasoner.tgt_anchor").value;
  const Matrix& offset = model.params.at("reasoner.frame_offset").value;
  Matrix slot(1, model.config.dim);
  for (std::size_t j = 0; j < slot.cols(); ++j) slot(0, j) = anchor(0, j) + offset(0, j) + q(0, j);
  const Matrix ln = testing::ref::layer_norm(slot, Matrix(1, slot.cols(), 1.0), Matrix(1, slot.cols()));
  for (std::size_t j = 0; j < slot.cols(); ++j) EXPECT_NEAR(out.target_token[j], ln(0, j), 1e-4);
}

TEST(QueryHashing, BagOfWordsWeights) {
  const Matrix a = query_bucket_weights("The RED square!", 64);
  const Matrix b = query_bucket_weights("the red square", 64);
  EXPECT_EQ(a, b);
  double s = 0.0;
  for (double v : a.values()) s += v;
  EXPECT_NEAR(s, 1.0, 1e-15);
  const Matrix empty = query_bucket_weights("", 64);
  for (double v : empty.values()) EXPECT_EQ(v, 0.0);
}

TEST(QueryHashing, GeneratorQueriesStayDistinct) {
  // Individual words may share a bucket; whole queries must not.
  std::set<std::string> texts;
  for (Category c : kAllCategories) {
    for (int r = 0; r <= static_cast<int>(Rule::kTouchedMostRecently); ++r) {
      for (std::uint8_t col = kRed; col <= kWhite; ++col) {
        try {
          texts.insert(query_text(c, QueryRule{static_cast<Rule>(r), col}));
        } catch (const Error&) {
        }
      }
    }
  }
  ASSERT_GT(texts.size(), 20u);
  std::set<std::vector<double>> codes;
  for (const auto& t : texts) codes.insert(query_bucket_weights(t, 256).values());
  EXPECT_EQ(codes.size(), texts.size());
}

TEST(Reasoner, GradientsPassFiniteDifferences) {
  Model m = Model::create(testing::tiny_config(), 13);
  std::mt19937_64 rng(23);
  std::vector<Frame> frames;
  for (int i = 0; i < 3; ++i) frames.push_back(random_frame(4, 4, rng));
  const Matrix mem = random_matrix(2, m.config.dim, rng);
  const Matrix wt = random_matrix(1, m.config.dim, rng);
  const Matrix wc = random_matrix(2, m.config.dim, rng);
  const Objective f = tape_objective([&](Tape& t, const ParamStore&) {
    std::vector<FrameVars> window;
    for (const auto& fr : frames) window.push_back(encode_frame(t, m, fr));
    const PromptAssembly a = assemble_prompt(m.config, window.size(), mem.rows());
    const ReasonerVars r = reason_step(t, m, a, embed_query(t, m, "the red square"), window, t.constant(mem));
    return t.add(t.sum(t.mul(r.target, t.constant(wt))), t.sum(t.mul(r.context, t.constant(wc))));
  });
  GradCheckOptions opt;
  opt.prefixes = {"reasoner."};
  opt.probes = 40;
  EXPECT_LT(grad_check(m.params, f, opt).max_rel_error, 1e-4);
}

}  // namespace
}  // namespace orvos
