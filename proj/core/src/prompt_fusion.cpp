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

#include "orvos/prompt_fusion.hpp"

#include <string>

#include "orvos/errors.hpp"

namespace orvos {

Var fuse_prompt(Tape& tape, Var target, Var context, double lambda) {
  if (!context.valid() || tape.value(context).rows() == 0 || lambda == 0.0) return target;
  if (tape.value(context).cols() != tape.value(target).cols()) {
    throw ShapeError("fuse_prompt: context width " + std::to_string(tape.value(context).cols()) +
                     " vs target width " + std::to_string(tape.value(target).cols()));
  }
  Var affinity = tape.cosine_rows(context, target);            // K x 1
  Var weights = tape.softmax_rows(tape.transpose(affinity));   // 1 x K
  Var injected = tape.matmul(weights, context);                // 1 x d
  return tape.add(target, tape.scale(injected, lambda));
}

FusionResult fuse_prompt_detailed(const PromptBundle& bundle) {
  const std::size_t d = bundle.target.size();
  if (bundle.context.rows() > 0 && bundle.context.cols() != d) {
    throw ShapeError("fuse_prompt: context width " + std::to_string(bundle.context.cols()) +
                     " vs target width " + std::to_string(d));
  }
  Tape tape(false);
  Var target = tape.constant(Matrix::row_vector(bundle.target));
  FusionResult result;
  if (bundle.context.rows() == 0) {
    result.fused = bundle.target;
    return result;
  }
  Var context = tape.constant(bundle.context);
  Var affinity = tape.cosine_rows(context, target);
  Var weights = tape.softmax_rows(tape.transpose(affinity));
  result.affinities = tape.value(affinity).values();
  result.weights = tape.value(weights).values();
  result.fused = tape.value(fuse_prompt(tape, target, context, bundle.lambda)).values();
  return result;
}

Vector fuse_prompt(const PromptBundle& bundle) { return fuse_prompt_detailed(bundle).fused; }

}  // namespace orvos
