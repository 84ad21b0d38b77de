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
#include <string>

#include "orvos/matrix.hpp"
#include "orvos/params.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Shape of one post-norm Transformer encoder block.
struct EncoderShape {
  std::size_t dim = 64;
  std::size_t heads = 8;
  std::size_t ffn_hidden = 256;
};

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng);

/// Registers `<prefix>.attn.{wq,wk,wv,wo}`, `<prefix>.ffn.{w1,b1,w2,b2}` and
/// `<prefix>.ln{1,2}.{gain,bias}`.
void register_encoder_block(ParamStore& store, const std::string& prefix, const EncoderShape& shape,
                            std::mt19937_64& rng);

/// Scaled dot-product self-attention with `heads` heads of width dim/heads,
/// head concatenation and output projection. Throws ConfigError when the
/// width is not divisible by `heads`.
Var multi_head_self_attention(Tape& tape, const ParamStore& store, const std::string& prefix, Var x,
                              std::size_t heads);

/// y = LN(x + Attn(x)); out = LN(y + FFN(y)), FFN = linear, ReLU, linear.
Var encoder_block(Tape& tape, const ParamStore& store, const std::string& prefix, Var x,
                  std::size_t heads);

/// Plain-value wrappers over the tape versions.
TokenMatrix multi_head_self_attention(const TokenMatrix& x, const ParamStore& store,
                                      const std::string& prefix, std::size_t heads);
TokenMatrix encoder_block(const TokenMatrix& x, const ParamStore& store, const std::string& prefix,
                          std::size_t heads);

}  // namespace orvos
