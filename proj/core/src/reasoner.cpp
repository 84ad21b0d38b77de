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

#include "orvos/reasoner.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "orvos/errors.hpp"
#include "orvos/layers.hpp"

namespace orvos {

namespace {

constexpr double kEmbedStd = 0.2;

std::string layer_prefix(std::size_t i) { return "reasoner.layer" + std::to_string(i); }

std::uint64_t fnv1a(std::string_view word) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : word) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

/// splitmix64 finalizer; FNV-1a alone leaves the low bits poorly mixed.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double coordinate(std::size_t i, std::size_t n) {
  return n <= 1 ? 0.0 : 2.0 * static_cast<double>(i) / static_cast<double>(n - 1) - 1.0;
}

struct FrameInputs {
  std::size_t grid_h = 0, grid_w = 0;
  Matrix channels;  // cells x (regions + 2)
  Matrix pooling;   // regions x cells, rows sum to 1 (or 0 when absent)
  Matrix coverage;  // regions x 1
};

FrameInputs frame_inputs(const ModelConfig& cfg, const Frame& frame) {
  const std::size_t s = cfg.feature_stride;
  if (frame.height == 0 || frame.width == 0 || frame.cells.size() != frame.height * frame.width) {
    throw ShapeError("encode_frame: malformed frame");
  }
  if (frame.height % s != 0 || frame.width % s != 0) {
    throw ShapeError("encode_frame: frame " + std::to_string(frame.height) + "x" +
                     std::to_string(frame.width) + " not divisible by stride " + std::to_string(s));
  }
  const std::size_t regions = cfg.region_count();
  FrameInputs in;
  in.grid_h = frame.height / s;
  in.grid_w = frame.width / s;
  const std::size_t cells = in.grid_h * in.grid_w;
  in.channels = Matrix(cells, regions + 2);
  const double block = static_cast<double>(s * s);
  for (std::size_t y = 0; y < frame.height; ++y) {
    for (std::size_t x = 0; x < frame.width; ++x) {
      const std::uint8_t c = frame.at(y, x);
      if (c >= cfg.palette) {
        throw ShapeError("encode_frame: colour " + std::to_string(c) + " outside palette of " +
                         std::to_string(cfg.palette));
      }
      if (c == 0) continue;
      in.channels((y / s) * in.grid_w + x / s, c - 1) += 1.0 / block;
    }
  }
  for (std::size_t gy = 0; gy < in.grid_h; ++gy) {
    for (std::size_t gx = 0; gx < in.grid_w; ++gx) {
      in.channels(gy * in.grid_w + gx, regions) = coordinate(gx, in.grid_w);
      in.channels(gy * in.grid_w + gx, regions + 1) = coordinate(gy, in.grid_h);
    }
  }
  in.pooling = Matrix(regions, cells);
  in.coverage = Matrix(regions, 1);
  for (std::size_t r = 0; r < regions; ++r) {
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) total += in.channels(i, r);
    in.coverage(r, 0) = total / static_cast<double>(cells);
    if (total == 0.0) continue;
    for (std::size_t i = 0; i < cells; ++i) in.pooling(r, i) = in.channels(i, r) / total;
  }
  return in;
}

}  // namespace

void register_reasoner(ParamStore& store, const ModelConfig& cfg, std::mt19937_64& rng) {
  const std::size_t regions = cfg.region_count();
  const std::size_t d = cfg.dim;
  const std::size_t dv = cfg.visual_dim;
  store.add("reasoner.frame.w",
            gaussian_matrix(regions + 2, dv, 1.0 / std::sqrt(static_cast<double>(regions + 2)), rng));
  store.add("reasoner.frame.b", Matrix(1, dv));
  store.add("reasoner.visual.w", gaussian_matrix(dv + 1, d, 1.0 / std::sqrt(static_cast<double>(dv + 1)), rng));
  store.add("reasoner.visual.b", Matrix(1, d));
  store.add("reasoner.region_embed", gaussian_matrix(regions, d, kEmbedStd, rng));
  store.add("reasoner.frame_offset", gaussian_matrix(cfg.context_frames + 1, d, kEmbedStd, rng));
  store.add("reasoner.seg_anchor", gaussian_matrix(1, d, kEmbedStd, rng));
  store.add("reasoner.tgt_anchor", gaussian_matrix(1, d, kEmbedStd, rng));
  store.add("reasoner.memory_slot", gaussian_matrix(cfg.memory_tokens, d, kEmbedStd, rng));
  store.add("reasoner.instruction", gaussian_matrix(cfg.instruction_tokens, d, kEmbedStd, rng));
  store.add("reasoner.query_table", gaussian_matrix(cfg.query_buckets, d, 1.0, rng));
  const EncoderShape shape{d, cfg.reasoner_heads, d * cfg.ffn_multiplier};
  for (std::size_t i = 0; i < cfg.reasoner_layers; ++i) {
    register_encoder_block(store, layer_prefix(i), shape, rng);
  }
}

FrameVars encode_frame(Tape& tape, const Model& model, const Frame& frame) {
  const FrameInputs in = frame_inputs(model.config, frame);
  FrameVars out;
  out.frame_height = frame.height;
  out.frame_width = frame.width;
  out.grid_height = in.grid_h;
  out.grid_width = in.grid_w;
  out.cells = tape.add_row(tape.matmul(tape.constant(in.channels), tape.parameter(model.params, "reasoner.frame.w")),
                           tape.parameter(model.params, "reasoner.frame.b"));
  const std::size_t cells = in.grid_h * in.grid_w;
  out.pooled = tape.matmul(tape.constant(Matrix(1, cells, 1.0 / static_cast<double>(cells))), out.cells);
  const std::array<Var, 2> parts{tape.matmul(tape.constant(in.pooling), out.cells),
                                 tape.constant(in.coverage)};
  out.regions = tape.concat_cols(parts);
  return out;
}

SceneFeatures encode_frame(const Model& model, const Frame& frame) {
  Tape tape(false);
  const FrameVars v = encode_frame(tape, model, frame);
  SceneFeatures f;
  f.frame_height = v.frame_height;
  f.frame_width = v.frame_width;
  f.grid_height = v.grid_height;
  f.grid_width = v.grid_width;
  f.cells = tape.value(v.cells);
  f.pooled = tape.value(v.pooled);
  f.regions = tape.value(v.regions);
  return f;
}

FrameVars as_constants(Tape& tape, const SceneFeatures& f) {
  FrameVars v;
  v.frame_height = f.frame_height;
  v.frame_width = f.frame_width;
  v.grid_height = f.grid_height;
  v.grid_width = f.grid_width;
  v.cells = tape.constant(f.cells);
  v.pooled = tape.constant(f.pooled);
  v.regions = tape.constant(f.regions);
  return v;
}

Matrix query_bucket_weights(std::string_view text, std::size_t buckets) {
  Matrix w(1, buckets);
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!current.empty()) {
      words.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  for (const auto& word : words) w(0, mix64(fnv1a(word)) % buckets) += 1.0 / static_cast<double>(words.size());
  return w;
}

Var embed_query(Tape& tape, const Model& model, std::string_view text) {
  return tape.matmul(tape.constant(query_bucket_weights(text, model.config.query_buckets)),
                     tape.parameter(model.params, "reasoner.query_table"));
}

PromptAssembly assemble_prompt(const ModelConfig& cfg, std::size_t window_length,
                               std::size_t memory_rows) {
  if (window_length == 0) throw InvalidArgument("assemble_prompt: empty frame window");
  if (window_length > cfg.context_frames + 1) {
    throw InvalidArgument("assemble_prompt: window of " + std::to_string(window_length) +
                          " frames exceeds K + 1 = " + std::to_string(cfg.context_frames + 1));
  }
  PromptAssembly a;
  for (std::size_t i = 0; i < cfg.instruction_tokens; ++i) a.slots.push_back({SlotKind::kInstruction, 0, i});
  a.slots.push_back({SlotKind::kQuery, 0, 0});
  for (std::size_t j = 0; j < window_length; ++j) {
    const std::size_t offset = window_length - 1 - j;
    for (std::size_t r = 0; r < cfg.region_count(); ++r) a.slots.push_back({SlotKind::kVisual, offset, r});
    if (offset == 0) {
      a.target_anchor = a.slots.size();
      a.slots.push_back({SlotKind::kTargetAnchor, 0, 0});
    } else {
      a.seg_anchors.insert(a.seg_anchors.begin(), a.slots.size());
      a.slots.push_back({SlotKind::kSegAnchor, offset, 0});
    }
  }
  for (std::size_t i = 0; i < memory_rows; ++i) a.slots.push_back({SlotKind::kMemory, 0, i});
  return a;
}

ReasonerVars reason_step(Tape& tape, const Model& model, const PromptAssembly& assembly, Var query,
                         std::span<const FrameVars> window, Var memory) {
  const ModelConfig& cfg = model.config;
  const auto& P = model.params;
  if (window.size() != assembly.context_frames() + 1) {
    throw ShapeError("reason_step: assembly expects " + std::to_string(assembly.context_frames() + 1) +
                     " frames, window has " + std::to_string(window.size()));
  }
  Var offsets = tape.parameter(P, "reasoner.frame_offset");
  Var region_embed = tape.parameter(P, "reasoner.region_embed");
  Var visual_w = tape.parameter(P, "reasoner.visual.w");
  Var visual_b = tape.parameter(P, "reasoner.visual.b");

  std::vector<Var> blocks;
  blocks.push_back(tape.parameter(P, "reasoner.instruction"));
  blocks.push_back(query);
  for (std::size_t j = 0; j < window.size(); ++j) {
    const std::size_t offset = window.size() - 1 - j;
    const std::array<std::size_t, 1> which{offset};
    Var offset_row = tape.gather_rows(offsets, which);
    Var visual = tape.add_row(tape.matmul(window[j].regions, visual_w), visual_b);
    visual = tape.add_row(tape.add(visual, region_embed), offset_row);
    blocks.push_back(visual);
    // Anchors carry the query so that readout does not hinge on learning to
    // attend to a single slot first.
    Var anchor = tape.parameter(P, offset == 0 ? "reasoner.tgt_anchor" : "reasoner.seg_anchor");
    blocks.push_back(tape.add(tape.add(anchor, offset_row), query));
  }
  if (memory.valid() && tape.value(memory).rows() > 0) {
    if (tape.value(memory).rows() != cfg.memory_tokens) {
      throw ShapeError("reason_step: " + std::to_string(tape.value(memory).rows()) + " memory rows, expected " +
                       std::to_string(cfg.memory_tokens));
    }
    // Slot embeddings keep memory rows distinguishable inside the encoder.
    blocks.push_back(tape.add(memory, tape.parameter(P, "reasoner.memory_slot")));
  }
  Var x = tape.concat_rows(blocks);
  if (tape.value(x).rows() != assembly.slots.size()) {
    throw ShapeError("reason_step: sequence of " + std::to_string(tape.value(x).rows()) +
                     " rows does not match " + std::to_string(assembly.slots.size()) + " slots");
  }
  for (std::size_t i = 0; i < cfg.reasoner_layers; ++i) {
    x = encoder_block(tape, P, layer_prefix(i), x, cfg.reasoner_heads);
  }
  ReasonerVars out;
  out.encoded = x;
  out.target = tape.slice_rows(x, assembly.target_anchor, 1);
  if (!assembly.seg_anchors.empty()) out.context = tape.gather_rows(x, assembly.seg_anchors);
  return out;
}

ReasonerOutput reason_step(const Model& model, std::string_view query,
                           std::span<const SceneFeatures> window, const TokenMatrix& memory) {
  Tape tape(false);
  std::vector<FrameVars> frames;
  for (const auto& f : window) frames.push_back(as_constants(tape, f));
  const PromptAssembly assembly = assemble_prompt(model.config, window.size(), memory.rows());
  const ReasonerVars r = reason_step(tape, model, assembly, embed_query(tape, model, query), frames,
                                     memory.rows() > 0 ? tape.constant(memory) : Var{});
  ReasonerOutput out;
  out.target_token = tape.value(r.target).values();
  if (r.context.valid()) out.context_tokens = tape.value(r.context);
  return out;
}

}  // namespace orvos
