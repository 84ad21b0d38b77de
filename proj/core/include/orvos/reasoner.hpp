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
#include <span>
#include <string_view>
#include <vector>

#include "orvos/mask.hpp"
#include "orvos/matrix.hpp"
#include "orvos/model.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Output of the toy vision tower for one frame.
struct SceneFeatures {
  std::size_t frame_height = 0;
  std::size_t frame_width = 0;
  std::size_t grid_height = 0;
  std::size_t grid_width = 0;
  /// grid cells x visual_dim, row-major over the feature grid.
  Matrix cells;
  /// 1 x visual_dim mean over cells.
  Matrix pooled;
  /// One row per non-background colour: coverage-weighted mean of the cell
  /// features followed by the colour's coverage fraction.
  Matrix regions;

  friend bool operator==(const SceneFeatures&, const SceneFeatures&) = default;
};

/// SceneFeatures recorded on a tape.
struct FrameVars {
  std::size_t frame_height = 0;
  std::size_t frame_width = 0;
  std::size_t grid_height = 0;
  std::size_t grid_width = 0;
  Var cells;
  Var pooled;
  Var regions;
};

void register_reasoner(ParamStore& store, const ModelConfig& config, std::mt19937_64& rng);

/// Per-cell linear projection of [colour one-hot (background excluded),
/// x, y] into visual_dim. Throws ShapeError for colour indices outside the
/// palette or a geometry not divisible by the feature stride.
FrameVars encode_frame(Tape& tape, const Model& model, const Frame& frame);
SceneFeatures encode_frame(const Model& model, const Frame& frame);
FrameVars as_constants(Tape& tape, const SceneFeatures& features);

/// Row weights (1 x buckets) of the hashed bag of lower-cased words.
Matrix query_bucket_weights(std::string_view text, std::size_t buckets);
Var embed_query(Tape& tape, const Model& model, std::string_view text);

enum class SlotKind { kInstruction, kQuery, kVisual, kSegAnchor, kTargetAnchor, kMemory };

struct Slot {
  SlotKind kind = SlotKind::kInstruction;
  /// Frames back from the current one (visual slots and anchors).
  std::size_t frame_offset = 0;
  /// Row within the slot's source block.
  std::size_t index = 0;
};

/// Slot layout [instruction; query; visual(context..., current); memory]
/// with a SEG anchor right after each context frame's visual slots and a
/// TGT anchor right after the current frame's.
struct PromptAssembly {
  std::vector<Slot> slots;
  std::size_t target_anchor = 0;
  /// Positions of the SEG anchors, most recent context frame first.
  std::vector<std::size_t> seg_anchors;

  std::size_t context_frames() const { return seg_anchors.size(); }
};

/// `window_length` counts the current frame; it must lie in [1, K + 1].
PromptAssembly assemble_prompt(const ModelConfig& config, std::size_t window_length,
                               std::size_t memory_rows);

struct ReasonerVars {
  Var target;   // 1 x d, read at the TGT anchor
  Var context;  // k x d, read at the SEG anchors; invalid when k == 0
  Var encoded;  // full output sequence
};

/// Runs the encoder over the assembled slots. `window` is oldest first and
/// ends with the current frame.
ReasonerVars reason_step(Tape& tape, const Model& model, const PromptAssembly& assembly, Var query,
                         std::span<const FrameVars> window, Var memory);

struct ReasonerOutput {
  Vector target_token;
  TokenMatrix context_tokens;
};

ReasonerOutput reason_step(const Model& model, std::string_view query,
                           std::span<const SceneFeatures> window, const TokenMatrix& memory);

}  // namespace orvos
