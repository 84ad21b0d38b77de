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

#include "orvos/stream_engine.hpp"

#include <algorithm>
#include <sstream>

#include "orvos/errors.hpp"
#include "orvos/mask_head.hpp"
#include "orvos/memory_aggregator.hpp"
#include "orvos/prompt_fusion.hpp"

namespace orvos {

namespace {

void check_geometry(std::size_t& height, std::size_t& width, const Frame& frame) {
  if (height == 0 && width == 0) {
    height = frame.height;
    width = frame.width;
    return;
  }
  if (frame.height != height || frame.width != width) {
    throw ShapeError("stream: frame " + std::to_string(frame.height) + "x" + std::to_string(frame.width) +
                     " does not match stream geometry " + std::to_string(height) + "x" +
                     std::to_string(width));
  }
}

bool same_outputs(const StreamOutput& a, const StreamOutput& b, std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) {
    if (!(a.masks[i] == b.masks[i]) || a.answers[i] != b.answers[i]) return false;
  }
  return true;
}

}  // namespace

StepVars forward_step(Tape& tape, const Model& model, Var query, std::span<const FrameVars> window,
                      Var memory) {
  const ModelConfig& cfg = model.config;
  const std::size_t memory_rows = memory.valid() ? tape.value(memory).rows() : 0;
  const PromptAssembly assembly = assemble_prompt(cfg, window.size(), memory_rows);
  StepVars out;
  out.reasoning = reason_step(tape, model, assembly, query, window, memory);
  out.fused = uses_fusion(cfg.arm)
                  ? fuse_prompt(tape, out.reasoning.target, out.reasoning.context, cfg.fusion_lambda)
                  : out.reasoning.target;
  out.prompt = project_prompt(tape, model, out.fused);
  out.mask_logits = decode_mask(tape, model, window.back(), out.prompt);
  out.answer_logits = answer_logits(tape, model, out.fused);
  return out;
}

StreamState init_stream(const Model& model, const QuerySpec& query) {
  StreamState s;
  s.query_text = query.text;
  s.reservoir = TokenReservoir(model.config.reservoir_capacity, retention_for(model.config.arm),
                               model.config.compact_reservoir);
  s.memory = init_memory(model);
  return s;
}

StepOutput step(const Model& model, StreamState& state, const Frame& frame) {
  const ModelConfig& cfg = model.config;
  check_geometry(state.height, state.width, frame);
  ++state.t;
  state.access_log = std::max(state.access_log, state.t);

  state.window.push_back(encode_frame(model, frame));
  while (state.window.size() > cfg.context_frames + 1) state.window.pop_front();

  Tape tape(false);
  std::vector<FrameVars> window;
  window.reserve(state.window.size());
  for (const auto& f : state.window) window.push_back(as_constants(tape, f));
  const StepVars v = forward_step(tape, model, embed_query(tape, model, state.query_text), window,
                                  tape.constant(state.memory));

  StepOutput out;
  const Matrix grid(frame.height, frame.width, tape.value(v.mask_logits).values());
  out.mask = threshold_mask(grid, frame.height, frame.width);
  out.answer_logits = {tape.value(v.answer_logits)(0, 0), tape.value(v.answer_logits)(0, 1)};
  out.fused_prompt = tape.value(v.fused).values();

  state.reservoir.write(out.fused_prompt);
  if (uses_reservoir(cfg.arm)) state.memory = aggregate_memory(model, state.reservoir.read_history());
  return out;
}

StreamOutput run_stream(const Model& model, std::span<const Frame> video, const QuerySpec& query,
                        Mutant mutant) {
  if (video.empty()) throw InvalidArgument("run_stream: empty video");
  StreamState state = init_stream(model, query);
  StreamOutput out;
  out.masks.reserve(video.size());
  for (std::size_t i = 0; i < video.size(); ++i) {
    std::size_t index = i;
    if (mutant == Mutant::kLeakFuture && i + 1 < video.size()) index = i + 1;
    out.max_access = std::max(out.max_access, index + 1);
    if (index > i) out.access_violation = true;
    StepOutput r = step(model, state, video[index]);
    out.masks.push_back(std::move(r.mask));
    out.answers.push_back(r.answer_logits);
  }
  return out;
}

std::string AuditReport::summary() const {
  std::ostringstream os;
  if (passed) {
    os << "pass: " << prefixes_checked << " prefixes of " << frames << " frames agree bitwise";
  } else {
    os << "FAIL:";
    if (divergence_step) {
      os << " step " << *divergence_step << " differs between the prefix-" << *divergence_prefix
         << " run and the full run";
    }
    if (access_violation) os << " (a step requested a future frame)";
  }
  return os.str();
}

AuditReport causality_audit(const Model& model, std::span<const Frame> video, const QuerySpec& query,
                            Mutant mutant) {
  AuditReport report;
  report.frames = video.size();
  if (video.empty()) return report;
  const StreamOutput full = run_stream(model, video, query, mutant);
  report.access_violation = full.access_violation;
  for (std::size_t p = 1; p <= video.size(); ++p) {
    const StreamOutput prefix = run_stream(model, video.first(p), query, mutant);
    ++report.prefixes_checked;
    if (!same_outputs(prefix, full, p)) {
      for (std::size_t i = 0; i < p; ++i) {
        if (!(prefix.masks[i] == full.masks[i]) || prefix.answers[i] != full.answers[i]) {
          report.divergence_step = i + 1;
          break;
        }
      }
      report.divergence_prefix = p;
      break;
    }
  }
  report.passed = !report.divergence_step && !report.access_violation;
  return report;
}

UnrolledStream::UnrolledStream(Tape& tape, const Model& model, const StreamState& warm_start)
    : tape_(tape), model_(model), t_(warm_start.t), height_(warm_start.height), width_(warm_start.width) {
  query_ = embed_query(tape_, model_, warm_start.query_text);
  for (const auto& f : warm_start.window) window_.push_back(as_constants(tape_, f));
  for (const auto& e : warm_start.reservoir.entries()) {
    reservoir_.push_back(tape_.constant(Matrix::row_vector(e.token)));
  }
  if (warm_start.t == 0 || !uses_reservoir(model_.config.arm)) {
    memory_ = aggregate_memory(tape_, model_, Var{});
  } else {
    memory_ = tape_.constant(warm_start.memory);
  }
}

StepVars UnrolledStream::step(const Frame& frame) {
  const ModelConfig& cfg = model_.config;
  check_geometry(height_, width_, frame);
  ++t_;
  window_.push_back(encode_frame(tape_, model_, frame));
  while (window_.size() > cfg.context_frames + 1) window_.pop_front();
  const std::vector<FrameVars> window(window_.begin(), window_.end());
  StepVars v = forward_step(tape_, model_, query_, window, memory_);

  reservoir_.push_back(v.fused);
  if (uses_reservoir(cfg.arm)) {
    if (cfg.compact_reservoir) {
      throw ConfigError("training with a compacted reservoir is not supported");
    }
    const IndexSet idx = sample_indices(retention_for(cfg.arm), reservoir_.size(), cfg.reservoir_capacity);
    std::vector<Var> rows;
    rows.reserve(idx.size());
    for (std::size_t i : idx) rows.push_back(reservoir_[i - 1]);
    memory_ = aggregate_memory(tape_, model_, tape_.concat_rows(rows));
  }
  return v;
}

}  // namespace orvos
