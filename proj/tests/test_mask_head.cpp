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
#include <numbers>
#include <random>

#include "orvos/errors.hpp"
#include "orvos/grad_check.hpp"
#include "orvos/mask_head.hpp"
#include "orvos/ops.hpp"
#include "orvos/reasoner.hpp"
#include "test_support.hpp"

namespace orvos {
namespace {

using testing::random_matrix;

BinaryMask random_mask(std::size_t h, std::size_t w, std::mt19937_64& rng) {
  std::bernoulli_distribution b(0.4);
  BinaryMask m(h, w);
  for (auto& c : m.cells) c = b(rng);
  return m;
}

BinaryMask full_mask(std::size_t h, std::size_t w) {
  BinaryMask m(h, w);
  for (auto& c : m.cells) c = 1;
  return m;
}

/// Central differences of a scalar loss over every input entry.
template <class F>
Matrix numeric_grad(Matrix x, F f, double step = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x.values()[i];
    x.values()[i] = v + step;
    const double up = f(x);
    x.values()[i] = v - step;
    const double down = f(x);
    x.values()[i] = v;
    g.values()[i] = (up - down) / (2 * step);
  }
  return g;
}

TEST(ProjectPrompt, ZeroWeightsAndHandCase) {
  Model m = Model::create(testing::tiny_config(), 1);
  for (const char* n : {"mask.proj.w1", "mask.proj.b1", "mask.proj.w2", "mask.proj.b2"}) m.params.at(n).value.fill(0.0);
  const Vector g{1, -2, 3, 0.5, 0, 1, -1, 2};
  for (double v : project_prompt(m, g)) EXPECT_EQ(v, 0.0);

  std::mt19937_64 rng(2);
  Matrix& w1 = m.params.at("mask.proj.w1").value;
  for (std::size_t i = 0; i < w1.rows(); ++i) w1(i, i) = 1.0;
  m.params.at("mask.proj.w2").value = random_matrix(8, 4, rng);
  const Matrix& w2 = m.params.at("mask.proj.w2").value;
  const Vector z = project_prompt(m, g);
  for (std::size_t k = 0; k < 4; ++k) {
    double v = 0.0;
    for (std::size_t j = 0; j < 8; ++j) v += std::max(0.0, g[j]) * w2(j, k);
    EXPECT_NEAR(z[k], v, 1e-14);
  }
  EXPECT_EQ(project_prompt(m, g), z);
  EXPECT_THROW(project_prompt(m, Vector(5, 1.0)), ShapeError);
}

SceneFeatures hand_features() {
  SceneFeatures f;
  f.frame_height = f.grid_height = 2;
  f.frame_width = f.grid_width = 2;
  f.cells = Matrix::from_rows({{0.5, 1, 0, 0}, {-2, 0, 1, 0}, {3, 0, 0, 1}, {0.25, 4, 4, 4}});
  f.pooled = Matrix(1, 4);
  f.regions = Matrix(8, 5);
  return f;
}

TEST(DecodeMask, Examples) {
  Model m = Model::create(testing::tiny_config(), 1);
  const SceneFeatures f = hand_features();
  m.params.at("mask.bias").value(0, 0) = 0.0;
  const Matrix zero = decode_mask(m, f, Vector(4, 0.0));
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
  EXPECT_TRUE(threshold_mask(zero, 2, 2).none());

  const Matrix first = decode_mask(m, f, Vector{1, 0, 0, 0});
  EXPECT_EQ(first, Matrix::from_rows({{0.5, -2}, {3, 0.25}}));

  m.params.at("mask.bias").value(0, 0) = 10.0;
  EXPECT_EQ(threshold_mask(decode_mask(m, f, Vector(4, 0.0)), 2, 2).area(), 4u);
  EXPECT_THROW(decode_mask(m, f, Vector(3, 0.0)), ShapeError);
}

TEST(DecodeMask, LinearInPromptAndMonotoneInBias) {
  Model m = Model::create(testing::tiny_config(), 1);
  std::mt19937_64 rng(6);
  SceneFeatures f = hand_features();
  f.cells = random_matrix(4, 4, rng);
  m.params.at("mask.bias").value(0, 0) = 0.0;
  const Vector z1{0.3, -1, 2, 0.1}, z2{-0.5, 0.4, 0, 1.2};
  const double a = 1.7, b = -0.6;
  Vector mix(4);
  for (std::size_t i = 0; i < 4; ++i) mix[i] = a * z1[i] + b * z2[i];
  const Matrix l1 = decode_mask(m, f, z1), l2 = decode_mask(m, f, z2), lm = decode_mask(m, f, mix);
  for (std::size_t i = 0; i < lm.size(); ++i) EXPECT_NEAR(lm.values()[i], a * l1.values()[i] + b * l2.values()[i], 1e-13);

  BinaryMask prev(2, 2);
  for (double bias = -5.0; bias <= 5.0; bias += 0.25) {
    m.params.at("mask.bias").value(0, 0) = bias;
    const BinaryMask cur = threshold_mask(decode_mask(m, f, z1), 2, 2);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_GE(cur.cells[i], prev.cells[i]);
    prev = cur;
  }
}

TEST(DecodeMask, NearestNeighbourUpsampling) {
  ModelConfig c = testing::tiny_config();
  c.feature_stride = 2;
  const Model m = Model::create(c, 4);
  std::mt19937_64 rng(3);
  Frame fr(4, 6);
  std::uniform_int_distribution<int> col(0, 8);
  for (auto& v : fr.cells) v = static_cast<std::uint8_t>(col(rng));
  const SceneFeatures f = encode_frame(m, fr);
  const Vector z{0.2, -0.4, 1.0, 0.7};
  const Matrix logits = decode_mask(m, f, z);
  ASSERT_EQ(logits.rows(), 4u);
  ASSERT_EQ(logits.cols(), 6u);
  const double bias = m.params.at("mask.bias").value(0, 0);
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x < 6; ++x) {
      double v = bias;
      for (std::size_t k = 0; k < 4; ++k) v += f.cells((y / 2) * 3 + x / 2, k) * z[k];
      EXPECT_NEAR(logits(y, x), v, 1e-13);
    }
}

TEST(Losses, BceExamples) {
  EXPECT_NEAR(bce_loss(Matrix(3, 3), full_mask(3, 3)).value, std::log(2.0), 1e-15);
  Matrix sat(2, 2);
  BinaryMask gt(2, 2);
  gt.cells = {1, 0, 0, 1};
  sat.values() = {1000, -1000, -1000, 1000};
  const LossValue v = bce_loss(sat, gt);
  EXPECT_TRUE(std::isfinite(v.value));
  EXPECT_NEAR(v.value, 0.0, 1e-12);
  EXPECT_THROW(bce_loss(Matrix(2, 3), gt), ShapeError);
}

TEST(Losses, DiceExamples) {
  const BinaryMask ones = full_mask(4, 4);
  EXPECT_NEAR(dice_loss(Matrix(4, 4, 1.0), ones).value, 0.0, 1e-15);
  EXPECT_NEAR(dice_loss(Matrix(4, 4, 0.5), ones).value, 0.32, 1e-15);
}

TEST(Losses, CrossEntropyExamples) {
  EXPECT_NEAR(cross_entropy(Matrix::from_rows({{0, 0}}), 0).value, std::log(2.0), 1e-15);
  EXPECT_NEAR(cross_entropy(Matrix::from_rows({{10, -10}}), 0).value, 2.0611536e-9, 1e-15);
  EXPECT_THROW(cross_entropy(Matrix::from_rows({{0, 0}}), 2), InvalidArgument);
}

TEST(Losses, GradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const BinaryMask gt = random_mask(3, 3, rng);
    const Matrix x = random_matrix(3, 3, rng, 2.0);
    const Matrix gb = numeric_grad(x, [&](const Matrix& v) { return bce_loss(v, gt).value; });
    EXPECT_LT(testing::max_abs_diff(bce_loss(x, gt).grad, gb), 1e-6);

    Matrix p(3, 3);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    for (double& v : p.values()) v = u(rng);
    const Matrix gd = numeric_grad(p, [&](const Matrix& v) { return dice_loss(v, gt).value; });
    EXPECT_LT(testing::max_abs_diff(dice_loss(p, gt).grad, gd), 1e-6);

    const Matrix logits = random_matrix(1, 3, rng);
    const std::size_t target = trial % 3;
    const LossValue ce = cross_entropy(logits, target);
    const Vector sm = softmax(logits.values());
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(ce.grad(0, j), sm[j] - (j == target ? 1.0 : 0.0), 1e-14);
    const Matrix gc = numeric_grad(logits, [&](const Matrix& v) { return cross_entropy(v, target).value; });
    EXPECT_LT(testing::max_abs_diff(ce.grad, gc), 1e-8);
  }
}

TEST(Losses, RangesOnRandomInputs) {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 200; ++trial) {
    const BinaryMask gt = random_mask(4, 4, rng);
    const Matrix x = random_matrix(4, 4, rng, 3.0);
    EXPECT_GE(bce_loss(x, gt).value, 0.0);
    Matrix p(4, 4);
    for (std::size_t i = 0; i < p.size(); ++i) p.values()[i] = sigmoid(x.values()[i]);
    const double d = dice_loss(p, gt).value;
    EXPECT_GE(d, 0.0);
    EXPECT_LT(d, 1.0);
    EXPECT_GE(composite_loss(random_matrix(1, 2, rng), trial % 2, x, gt), 0.0);
  }
}

TEST(CompositeLoss, AnalyticCase) {
  const double v = composite_loss(Matrix(1, 2), 0, Matrix(4, 4), full_mask(4, 4));
  EXPECT_NEAR(v, 3.0 * std::numbers::ln2 + 0.16, 1e-9);
  EXPECT_NEAR(v, 2.239441, 1e-6);
}

TEST(CompositeLoss, PerfectPrediction) {
  BinaryMask gt(4, 4);
  gt.cells = {0, 1, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0};
  Matrix logits(4, 4);
  for (std::size_t i = 0; i < 16; ++i) logits.values()[i] = gt.cells[i] ? 50.0 : -50.0;
  const double v = composite_loss(Matrix::from_rows({{-50, 50}}), kTargetPresent, logits, gt);
  EXPECT_LT(v, 1e-6);
}

TEST(CompositeLoss, TapeFormGradient) {
  std::mt19937_64 rng(9);
  ParamStore p;
  p.add("answer", random_matrix(1, 2, rng));
  p.add("logits", random_matrix(16, 1, rng));
  const BinaryMask gt = random_mask(4, 4, rng);
  {
    Tape t(false);
    Var l = composite_loss(t, t.parameter(p, "answer"), 1, t.parameter(p, "logits"), gt);
    EXPECT_NEAR(t.value(l)(0, 0),
                composite_loss(p.at("answer").value, 1, Matrix(4, 4, p.at("logits").value.values()), gt), 1e-13);
  }
  const Objective f = tape_objective([&](Tape& t, const ParamStore& s) {
    return composite_loss(t, t.parameter(s, "answer"), 1, t.parameter(s, "logits"), gt);
  });
  GradCheckOptions opt;
  opt.probes = 20;
  EXPECT_LT(grad_check(p, f, opt).max_rel_error, 1e-4);
}

TEST(MaskHead, ParameterGradientsThroughDecoding) {
  Model m = Model::create(testing::tiny_config(), 21);
  std::mt19937_64 rng(5);
  Frame fr(4, 4);
  std::uniform_int_distribution<int> col(0, 8);
  for (auto& v : fr.cells) v = static_cast<std::uint8_t>(col(rng));
  const Matrix fused = random_matrix(1, m.config.dim, rng);
  const BinaryMask gt = random_mask(4, 4, rng);
  const Objective f = tape_objective([&](Tape& t, const ParamStore&) {
    const FrameVars fv = encode_frame(t, m, fr);
    Var g = t.constant(fused);
    Var z = project_prompt(t, m, g);
    return composite_loss(t, answer_logits(t, m, g), 0, decode_mask(t, m, fv, z), gt);
  });
  GradCheckOptions opt;
  opt.prefixes = {"mask."};
  opt.probes = 30;
  EXPECT_LT(grad_check(m.params, f, opt).max_rel_error, 1e-4);
}

}  // namespace
}  // namespace orvos
