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

#include "orvos/layers.hpp"

#include <cmath>
#include <vector>

#include "orvos/errors.hpp"
#include "orvos/ops.hpp"

namespace orvos {

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Matrix m(rows, cols);
  for (double& v : m.values()) v = dist(rng);
  return m;
}

void register_encoder_block(ParamStore& store, const std::string& prefix, const EncoderShape& shape,
                            std::mt19937_64& rng) {
  if (shape.heads == 0 || shape.dim % shape.heads != 0) {
    throw ConfigError(prefix + ": width " + std::to_string(shape.dim) +
                      " not divisible by " + std::to_string(shape.heads) + " heads");
  }
  const double s_in = 1.0 / std::sqrt(static_cast<double>(shape.dim));
  const double s_hidden = 1.0 / std::sqrt(static_cast<double>(shape.ffn_hidden));
  // Output projections start small so each block begins close to identity.
  const double s_out = 0.1;
  for (const char* w : {"wq", "wk", "wv"}) {
    store.add(prefix + ".attn." + w, gaussian_matrix(shape.dim, shape.dim, s_in, rng));
  }
  store.add(prefix + ".attn.wo", gaussian_matrix(shape.dim, shape.dim, s_in * s_out, rng));
  store.add(prefix + ".ffn.w1", gaussian_matrix(shape.dim, shape.ffn_hidden, s_in, rng));
  store.add(prefix + ".ffn.b1", Matrix(1, shape.ffn_hidden));
  store.add(prefix + ".ffn.w2", gaussian_matrix(shape.ffn_hidden, shape.dim, s_hidden * s_out, rng));
  store.add(prefix + ".ffn.b2", Matrix(1, shape.dim));
  for (const char* ln : {"ln1", "ln2"}) {
    store.add(prefix + "." + ln + ".gain", Matrix(1, shape.dim, 1.0));
    store.add(prefix + "." + ln + ".bias", Matrix(1, shape.dim));
  }
}

Var multi_head_self_attention(Tape& tape, const ParamStore& store, const std::string& prefix, Var x,
                              std::size_t heads) {
  const std::size_t dim = tape.value(x).cols();
  if (heads == 0 || dim % heads != 0) {
    throw ConfigError("attention: width " + std::to_string(dim) + " not divisible by " +
                      std::to_string(heads) + " heads");
  }
  const std::size_t head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  Var q = tape.matmul(x, tape.parameter(store, prefix + ".attn.wq"));
  Var k = tape.matmul(x, tape.parameter(store, prefix + ".attn.wk"));
  Var v = tape.matmul(x, tape.parameter(store, prefix + ".attn.wv"));

  std::vector<Var> head_outputs;
  head_outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Var qh = heads == 1 ? q : tape.slice_cols(q, h * head_dim, head_dim);
    Var kh = heads == 1 ? k : tape.slice_cols(k, h * head_dim, head_dim);
    Var vh = heads == 1 ? v : tape.slice_cols(v, h * head_dim, head_dim);
    Var scores = tape.scale(tape.matmul(qh, tape.transpose(kh)), scale);
    head_outputs.push_back(tape.matmul(tape.softmax_rows(scores), vh));
  }
  Var merged = heads == 1 ? head_outputs.front() : tape.concat_cols(head_outputs);
  return tape.matmul(merged, tape.parameter(store, prefix + ".attn.wo"));
}

Var encoder_block(Tape& tape, const ParamStore& store, const std::string& prefix, Var x,
                  std::size_t heads) {
  auto p = [&](const char* name) { return tape.parameter(store, prefix + name); };
  if (tape.value(x).cols() != store.at(prefix + ".attn.wq").value.rows()) {
    throw ShapeError(prefix + ": input width " + std::to_string(tape.value(x).cols()) +
                     " does not match block width " +
                     std::to_string(store.at(prefix + ".attn.wq").value.rows()));
  }
  Var attn = multi_head_self_attention(tape, store, prefix, x, heads);
  Var y = tape.layer_norm(tape.add(x, attn), p(".ln1.gain"), p(".ln1.bias"), kLayerNormEps);
  Var hidden = tape.relu(tape.add_row(tape.matmul(y, p(".ffn.w1")), p(".ffn.b1")));
  Var ffn = tape.add_row(tape.matmul(hidden, p(".ffn.w2")), p(".ffn.b2"));
  return tape.layer_norm(tape.add(y, ffn), p(".ln2.gain"), p(".ln2.bias"), kLayerNormEps);
}

TokenMatrix multi_head_self_attention(const TokenMatrix& x, const ParamStore& store,
                                      const std::string& prefix, std::size_t heads) {
  Tape tape(false);
  return tape.value(multi_head_self_attention(tape, store, prefix, tape.constant(x), heads));
}

TokenMatrix encoder_block(const TokenMatrix& x, const ParamStore& store, const std::string& prefix,
                          std::size_t heads) {
  Tape tape(false);
  return tape.value(encoder_block(tape, store, prefix, tape.constant(x), heads));
}

}  // namespace orvos
