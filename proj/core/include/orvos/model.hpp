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

#include <cstdint>
#include <string>
#include <string_view>

#include "orvos/params.hpp"
#include "orvos/reservoir.hpp"

namespace orvos {

/// Ablation arms: raw target token; + prompt fusion; + fusion and token
/// reservoir with uniform or dense-to-sparse retention.
enum class Arm { kBaseline, kCusp, kCuspUniformReservoir, kFull };

std::string_view to_string(Arm arm);
Arm parse_arm(std::string_view name);

inline bool uses_fusion(Arm arm) { return arm != Arm::kBaseline; }
inline bool uses_reservoir(Arm arm) {
  return arm == Arm::kCuspUniformReservoir || arm == Arm::kFull;
}
inline Retention retention_for(Arm arm) {
  return arm == Arm::kCuspUniformReservoir ? Retention::kUniform : Retention::kDenseToSparse;
}

struct ModelConfig {
  /// Colour indices per cell are < palette; index 0 is background.
  std::size_t palette = 9;
  /// Side of the square cell block averaged into one feature cell.
  std::size_t feature_stride = 1;
  std::size_t dim = 64;
  std::size_t visual_dim = 32;
  std::size_t context_frames = 4;
  std::size_t memory_tokens = 32;
  std::size_t reservoir_capacity = 32;
  bool compact_reservoir = false;
  std::size_t aggregator_heads = 8;
  std::size_t aggregator_layers = 2;
  std::size_t reasoner_heads = 4;
  std::size_t reasoner_layers = 2;
  std::size_t ffn_multiplier = 4;
  std::size_t instruction_tokens = 2;
  std::size_t query_buckets = 256;
  double fusion_lambda = 0.1;
  Arm arm = Arm::kFull;

  /// Throws ConfigError on inconsistent values.
  void validate() const;
  std::size_t region_count() const { return palette - 1; }
};

/// Configuration plus every trainable tensor of the pipeline.
struct Model {
  ModelConfig config;
  ParamStore params;

  /// Registers and initializes all parameters deterministically from `seed`.
  static Model create(const ModelConfig& config, std::uint64_t seed);
  /// Loads checkpoint values into a freshly shaped model; shapes must match.
  void load(const ParamStore& checkpoint);
};

}  // namespace orvos
