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

#include <random>

#include "orvos/matrix.hpp"
#include "orvos/model.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Registers the learnable memory queries `agg.queries` (L x d, N(0, 0.02))
/// and the encoder blocks `agg.layer<i>.*`.
void register_memory_aggregator(ParamStore& store, const ModelConfig& config, std::mt19937_64& rng);

/// M = Agg([Q ; H + PE])[0:L]; PE is indexed 0..N-1 over the sampled rows.
/// `history` may be invalid or have zero rows, which yields Agg([Q]).
Var aggregate_memory(Tape& tape, const Model& model, Var history);

TokenMatrix aggregate_memory(const Model& model, const TokenMatrix& history);

/// Memory before any history exists: the aggregator applied to the queries alone.
TokenMatrix init_memory(const Model& model);

}  // namespace orvos
