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

#include "orvos/memory_aggregator.hpp"

#include <array>
#include <string>

#include "orvos/errors.hpp"
#include "orvos/layers.hpp"
#include "orvos/ops.hpp"

namespace orvos {

namespace {

constexpr double kQueryInitStd = 0.02;

std::string layer_prefix(std::size_t i) { return "agg.layer" + std::to_string(i); }

}  // namespace

void register_memory_aggregator(ParamStore& store, const ModelConfig& config, std::mt19937_64& rng) {
  store.add("agg.queries", gaussian_matrix(config.memory_tokens, config.dim, kQueryInitStd, rng));
  const EncoderShape shape{config.dim, config.aggregator_heads, config.dim * config.ffn_multiplier};
  for (std::size_t i = 0; i < config.aggregator_layers; ++i) {
    register_encoder_block(store, layer_prefix(i), shape, rng);
  }
}

Var aggregate_memory(Tape& tape, const Model& model, Var history) {
  const ModelConfig& cfg = model.config;
  Var queries = tape.parameter(model.params, "agg.queries");
  Var x = queries;
  if (history.valid() && tape.value(history).rows() > 0) {
    const Matrix& h = tape.value(history);
    if (h.cols() != cfg.dim) {
      throw ShapeError("aggregate_memory: history width " + std::to_string(h.cols()) +
                       ", expected " + std::to_string(cfg.dim));
    }
    Var positioned = tape.add(history, tape.constant(sinusoidal_pe(h.rows(), cfg.dim)));
    const std::array<Var, 2> parts{queries, positioned};
    x = tape.concat_rows(parts);
  }
  for (std::size_t i = 0; i < cfg.aggregator_layers; ++i) {
    x = encoder_block(tape, model.params, layer_prefix(i), x, cfg.aggregator_heads);
  }
  return tape.slice_rows(x, 0, cfg.memory_tokens);
}

TokenMatrix aggregate_memory(const Model& model, const TokenMatrix& history) {
  Tape tape(false);
  Var h = history.rows() > 0 ? tape.constant(history) : Var{};
  return tape.value(aggregate_memory(tape, model, h));
}

TokenMatrix init_memory(const Model& model) { return aggregate_memory(model, TokenMatrix()); }

}  // namespace orvos
