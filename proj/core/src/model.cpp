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

#include "orvos/model.hpp"

#include <cmath>
#include <random>
#include <string>

#include "orvos/errors.hpp"
#include "orvos/mask_head.hpp"
#include "orvos/memory_aggregator.hpp"
#include "orvos/reasoner.hpp"

namespace orvos {

std::string_view to_string(Arm arm) {
  switch (arm) {
    case Arm::kBaseline: return "baseline";
    case Arm::kCusp: return "cusp";
    case Arm::kCuspUniformReservoir: return "cusp_tr_us";
    case Arm::kFull: return "cusp_tr_d2s";
  }
  return "unknown";
}

Arm parse_arm(std::string_view name) {
  for (Arm a : {Arm::kBaseline, Arm::kCusp, Arm::kCuspUniformReservoir, Arm::kFull}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown ablation arm '" + std::string(name) +
                    "' (expected baseline, cusp, cusp_tr_us or cusp_tr_d2s)");
}

void ModelConfig::validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("model config: " + what);
  };
  need(palette >= 2 && palette <= 256, "palette must be in [2, 256]");
  need(feature_stride >= 1, "feature_stride must be >= 1");
  need(dim >= 2 && dim % 2 == 0, "dim must be even and >= 2");
  need(visual_dim >= 1, "visual_dim must be >= 1");
  need(memory_tokens >= 1, "memory_tokens must be >= 1");
  need(reservoir_capacity >= 2, "reservoir_capacity must be >= 2");
  need(aggregator_heads >= 1 && dim % aggregator_heads == 0, "dim must be divisible by aggregator_heads");
  need(reasoner_heads >= 1 && dim % reasoner_heads == 0, "dim must be divisible by reasoner_heads");
  need(aggregator_layers >= 1 && reasoner_layers >= 1, "layer counts must be >= 1");
  need(ffn_multiplier >= 1, "ffn_multiplier must be >= 1");
  need(query_buckets >= 1, "query_buckets must be >= 1");
  need(std::isfinite(fusion_lambda), "fusion_lambda must be finite");
}

Model Model::create(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  Model m;
  m.config = config;
  std::mt19937_64 rng(seed);
  register_reasoner(m.params, config, rng);
  register_memory_aggregator(m.params, config, rng);
  register_mask_head(m.params, config, rng);
  return m;
}

void Model::load(const ParamStore& checkpoint) { params.assign_values(checkpoint); }

}  // namespace orvos
