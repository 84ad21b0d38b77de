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

#include "orvos/mask_head.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "orvos/errors.hpp"
#include "orvos/layers.hpp"
#include "orvos/ops.hpp"

namespace orvos {

namespace {

void check_cells(const Matrix& m, const BinaryMask& gt, const char* what) {
  if (m.size() != gt.cells.size() || gt.cells.size() != gt.height * gt.width) {
    throw ShapeError(std::string(what) + ": " + std::to_string(m.size()) + " values for a " +
                     std::to_string(gt.height) + "x" + std::to_string(gt.width) + " mask");
  }
}

std::vector<std::size_t> upsample_index(const FrameVars& f) {
  std::vector<std::size_t> idx(f.frame_height * f.frame_width);
  for (std::size_t y = 0; y < f.frame_height; ++y)
    for (std::size_t x = 0; x < f.frame_width; ++x)
      idx[y * f.frame_width + x] =
          (y * f.grid_height / f.frame_height) * f.grid_width + x * f.grid_width / f.frame_width;
  return idx;
}

}  // namespace

void register_mask_head(ParamStore& store, const ModelConfig& cfg, std::mt19937_64& rng) {
  const double s = 1.0 / std::sqrt(static_cast<double>(cfg.dim));
  store.add("mask.proj.w1", gaussian_matrix(cfg.dim, cfg.dim, s, rng));
  store.add("mask.proj.b1", Matrix(1, cfg.dim));
  store.add("mask.proj.w2", gaussian_matrix(cfg.dim, cfg.visual_dim, s, rng));
  store.add("mask.proj.b2", Matrix(1, cfg.visual_dim));
  store.add("mask.bias", Matrix(1, 1));
  store.add("mask.answer.w", gaussian_matrix(cfg.dim, 2, s, rng));
  store.add("mask.answer.b", Matrix(1, 2));
}

Var project_prompt(Tape& tape, const Model& model, Var fused) {
  const auto& P = model.params;
  if (tape.value(fused).cols() != model.config.dim) {
    throw ShapeError("project_prompt: width " + std::to_string(tape.value(fused).cols()) +
                     ", expected " + std::to_string(model.config.dim));
  }
  Var h = tape.relu(tape.add_row(tape.matmul(fused, tape.parameter(P, "mask.proj.w1")),
                                 tape.parameter(P, "mask.proj.b1")));
  return tape.add_row(tape.matmul(h, tape.parameter(P, "mask.proj.w2")),
                      tape.parameter(P, "mask.proj.b2"));
}

Vector project_prompt(const Model& model, const Vector& fused) {
  Tape tape(false);
  return tape.value(project_prompt(tape, model, tape.constant(Matrix::row_vector(fused)))).values();
}

Var decode_mask(Tape& tape, const Model& model, const FrameVars& features, Var z) {
  if (tape.value(z).rows() != 1 || tape.value(z).cols() != tape.value(features.cells).cols()) {
    throw ShapeError("decode_mask: prompt width " + std::to_string(tape.value(z).cols()) +
                     " vs feature width " + std::to_string(tape.value(features.cells).cols()));
  }
  Var logits = tape.matmul(features.cells, tape.transpose(z));
  logits = tape.add_scalar(logits, tape.parameter(model.params, "mask.bias"));
  if (features.grid_height != features.frame_height || features.grid_width != features.frame_width) {
    logits = tape.gather_rows(logits, upsample_index(features));
  }
  return logits;
}

Matrix decode_mask(const Model& model, const SceneFeatures& features, const Vector& z) {
  Tape tape(false);
  const FrameVars f = as_constants(tape, features);
  Matrix flat = tape.value(decode_mask(tape, model, f, tape.constant(Matrix::row_vector(z))));
  return Matrix(features.frame_height, features.frame_width, std::move(flat.values()));
}

BinaryMask threshold_mask(const Matrix& logits, std::size_t height, std::size_t width) {
  if (logits.size() != height * width) throw ShapeError("threshold_mask: size mismatch");
  BinaryMask m(height, width);
  for (std::size_t i = 0; i < m.cells.size(); ++i) m.cells[i] = sigmoid(logits.values()[i]) > 0.5 ? 1 : 0;
  return m;
}

Var answer_logits(Tape& tape, const Model& model, Var fused) {
  return tape.add_row(tape.matmul(fused, tape.parameter(model.params, "mask.answer.w")),
                      tape.parameter(model.params, "mask.answer.b"));
}

LossValue bce_loss(const Matrix& logits, const BinaryMask& gt) {
  check_cells(logits, gt, "bce_loss");
  const double n = static_cast<double>(logits.size());
  LossValue out{0.0, Matrix(logits.rows(), logits.cols())};
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits.values()[i];
    const double y = gt.cells[i] ? 1.0 : 0.0;
    out.value += std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
    out.grad.values()[i] = (sigmoid(x) - y) / n;
  }
  out.value /= n;
  return out;
}

LossValue dice_loss(const Matrix& probs, const BinaryMask& gt) {
  check_cells(probs, gt, "dice_loss");
  double inter = 0.0, sum_p = 0.0, sum_y = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = probs.values()[i];
    const double y = gt.cells[i] ? 1.0 : 0.0;
    inter += p * y;
    sum_p += p;
    sum_y += y;
  }
  const double num = 2.0 * inter + kDiceSmoothing;
  const double den = sum_p + sum_y + kDiceSmoothing;
  LossValue out{1.0 - num / den, Matrix(probs.rows(), probs.cols())};
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double y = gt.cells[i] ? 1.0 : 0.0;
    out.grad.values()[i] = -(2.0 * y * den - num) / (den * den);
  }
  return out;
}

LossValue cross_entropy(const Matrix& logits, std::size_t target) {
  if (logits.rows() != 1 || logits.cols() < 2) {
    throw ShapeError("cross_entropy: expected 1 x C logits with C >= 2");
  }
  if (target >= logits.cols()) {
    throw InvalidArgument("cross_entropy: target " + std::to_string(target) + " out of range for " +
                          std::to_string(logits.cols()) + " classes");
  }
  const Vector p = softmax(logits.row(0));
  const double peak = *std::max_element(logits.values().begin(), logits.values().end());
  double total = 0.0;
  for (double x : logits.values()) total += std::exp(x - peak);
  LossValue out{peak + std::log(total) - logits(0, target), Matrix(1, logits.cols())};
  for (std::size_t c = 0; c < logits.cols(); ++c) out.grad(0, c) = p[c] - (c == target ? 1.0 : 0.0);
  return out;
}

double composite_loss(const Matrix& answer, std::size_t answer_target, const Matrix& mask_logits,
                      const BinaryMask& gt) {
  Tape tape(false);
  return tape.value(composite_loss(tape, tape.constant(answer), answer_target,
                                   tape.constant(mask_logits), gt))(0, 0);
}

Var composite_loss(Tape& tape, Var answer, std::size_t answer_target, Var mask_logits,
                   const BinaryMask& gt) {
  LossValue ce = cross_entropy(tape.value(answer), answer_target);
  LossValue bce = bce_loss(tape.value(mask_logits), gt);
  Var probs = tape.sigmoid(mask_logits);
  LossValue dice = dice_loss(tape.value(probs), gt);
  Var l_ce = tape.attach_scalar(answer, ce.value, std::move(ce.grad));
  Var l_bce = tape.attach_scalar(mask_logits, bce.value, std::move(bce.grad));
  Var l_dice = tape.attach_scalar(probs, dice.value, std::move(dice.grad));
  return tape.add(tape.add(l_ce, tape.scale(l_bce, kBceWeight)), tape.scale(l_dice, kDiceWeight));
}

}  // namespace orvos
