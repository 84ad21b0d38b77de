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

#pragma once

#include <cstddef>
#include <random>

#include "orvos/mask.hpp"
#include "orvos/matrix.hpp"
#include "orvos/model.hpp"
#include "orvos/reasoner.hpp"
#include "orvos/tape.hpp"

namespace orvos {

inline constexpr double kBceWeight = 2.0;
inline constexpr double kDiceWeight = 0.5;
inline constexpr double kDiceSmoothing = 1.0;

/// Answer-head classes: whether the query has a referent in the current frame.
enum AnswerClass : std::size_t { kTargetAbsent = 0, kTargetPresent = 1 };

void register_mask_head(ParamStore& store, const ModelConfig& config, std::mt19937_64& rng);

/// z = W2 relu(W1 g + b1) + b2, d -> d -> visual_dim.
Var project_prompt(Tape& tape, const Model& model, Var fused);
Vector project_prompt(const Model& model, const Vector& fused);

/// Logit per frame cell: <feature(cell), z> + bias, nearest-neighbour
/// upsampled from the feature grid. Tape form returns (H * W) x 1.
Var decode_mask(Tape& tape, const Model& model, const FrameVars& features, Var z);
/// H x W logits.
Matrix decode_mask(const Model& model, const SceneFeatures& features, const Vector& z);

/// sigmoid(logit) > 0.5, strictly.
BinaryMask threshold_mask(const Matrix& logits, std::size_t height, std::size_t width);

/// 2-class target-present logits (1 x 2) from the fused prompt.
Var answer_logits(Tape& tape, const Model& model, Var fused);

struct LossValue {
  double value = 0.0;
  /// Gradient with respect to the loss input, same shape as the input.
  Matrix grad;
};

/// Mean over cells of max(x,0) - x*y + log(1 + exp(-|x|)).
LossValue bce_loss(const Matrix& logits, const BinaryMask& gt);
/// 1 - (2 sum(p*y) + eps) / (sum(p) + sum(y) + eps) with eps = kDiceSmoothing.
LossValue dice_loss(const Matrix& probs, const BinaryMask& gt);
/// -log softmax(logits)[target] over a 1 x C row.
LossValue cross_entropy(const Matrix& logits, std::size_t target);

/// CE + 2 BCE + 0.5 Dice(sigmoid(mask logits)).
double composite_loss(const Matrix& answer, std::size_t answer_target, const Matrix& mask_logits,
                      const BinaryMask& gt);
Var composite_loss(Tape& tape, Var answer, std::size_t answer_target, Var mask_logits,
                   const BinaryMask& gt);

}  // namespace orvos
