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
#include <vector>

#include "orvos/matrix.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Current target token g_t plus the segmentation tokens of the context
/// frames, most recent first.
struct PromptBundle {
  Vector target;
  TokenMatrix context;
  double lambda = 0.1;
};

struct FusionResult {
  Vector affinities;  // cosine(s_{t-i}, g_t)
  Vector weights;     // softmax of the affinities
  Vector fused;
};

/// g~ = g + lambda * sum_i softmax(cos(s_i, g))_i s_i; g~ = g with no context.
FusionResult fuse_prompt_detailed(const PromptBundle& bundle);
Vector fuse_prompt(const PromptBundle& bundle);

/// Tape form; `context` may be invalid (no context frames yet).
Var fuse_prompt(Tape& tape, Var target, Var context, double lambda);

}  // namespace orvos
