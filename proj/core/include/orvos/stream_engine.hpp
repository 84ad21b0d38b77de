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

#include <array>
#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "orvos/dataset.hpp"
#include "orvos/mask.hpp"
#include "orvos/model.hpp"
#include "orvos/reasoner.hpp"
#include "orvos/reservoir.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Everything one pipeline step produces on a tape.
struct StepVars {
  ReasonerVars reasoning;
  Var fused;          // prompt after fusion (the raw target token in the baseline arm)
  Var prompt;         // projected prompt z_t
  Var mask_logits;    // (H * W) x 1
  Var answer_logits;  // 1 x 2
};

/// reason -> fuse -> project -> decode on the current (last) window frame.
StepVars forward_step(Tape& tape, const Model& model, Var query, std::span<const FrameVars> window,
                      Var memory);

/// Per-stream state. Owned by exactly one worker.
struct StreamState {
  std::size_t t = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::string query_text;
  /// Features of frames t-K..t, oldest first.
  std::deque<SceneFeatures> window;
  TokenReservoir reservoir;
  /// Memory tokens the next step will read (exactly L rows).
  TokenMatrix memory;
  /// Largest 1-based frame index the stream has been handed.
  std::size_t access_log = 0;

  friend bool operator==(const StreamState&, const StreamState&) = default;
};

struct StepOutput {
  BinaryMask mask;
  std::array<double, 2> answer_logits{};
  Vector fused_prompt;
};

StreamState init_stream(const Model& model, const QuerySpec& query);

/// Advances the stream by one frame. The frame must match the geometry of
/// the first frame (ShapeError otherwise).
StepOutput step(const Model& model, StreamState& state, const Frame& frame);

/// Test-only pipeline mutations used to exercise the causality audit.
enum class Mutant { kNone, kLeakFuture };

struct StreamOutput {
  std::vector<BinaryMask> masks;
  std::vector<std::array<double, 2>> answers;
  /// Largest frame index requested from the video, over the whole run.
  std::size_t max_access = 0;
  /// Set when some step requested a frame past the current one.
  bool access_violation = false;
};

/// Folds step() over the video. `kLeakFuture` decodes step t from frame t+1
/// whenever that frame exists. Throws InvalidArgument on an empty video.
StreamOutput run_stream(const Model& model, std::span<const Frame> video, const QuerySpec& query,
                        Mutant mutant = Mutant::kNone);

struct AuditReport {
  bool passed = true;
  std::size_t frames = 0;
  std::size_t prefixes_checked = 0;
  /// First step whose output differs between a prefix run and the full run.
  std::optional<std::size_t> divergence_step;
  /// Length of the prefix run that exposed the divergence.
  std::optional<std::size_t> divergence_prefix;
  bool access_violation = false;

  std::string summary() const;
};

/// Runs every prefix V[1..p] independently and checks its outputs bitwise
/// against the first p outputs of the full run.
AuditReport causality_audit(const Model& model, std::span<const Frame> video, const QuerySpec& query,
                            Mutant mutant = Mutant::kNone);

/// Tape-level unroll of the same loop, used for training.
///
/// Starting from `warm_start` (a value-level state after earlier frames, or
/// a fresh stream), the window features, reservoir tokens and memory of the
/// warm start enter the tape as constants: gradients stop there.
class UnrolledStream {
 public:
  UnrolledStream(Tape& tape, const Model& model, const StreamState& warm_start);

  StepVars step(const Frame& frame);

  std::size_t t() const { return t_; }
  Var memory() const { return memory_; }
  const std::vector<Var>& reservoir() const { return reservoir_; }

 private:
  Tape& tape_;
  const Model& model_;
  Var query_;
  std::size_t t_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::deque<FrameVars> window_;
  std::vector<Var> reservoir_;
  Var memory_;
};

}  // namespace orvos
