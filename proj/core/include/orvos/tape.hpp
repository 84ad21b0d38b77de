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
#include <functional>
#include <limits>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "orvos/matrix.hpp"
#include "orvos/params.hpp"

namespace orvos {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

/// Minimal reverse-mode tape over dense matrices.
///
/// Nodes are appended in evaluation order, so the node vector is already a
/// topological order and backward() is a single reverse sweep. A tape built
/// with `record_gradients = false` keeps values only; every op is then a plain
/// forward evaluation.
class Tape {
 public:
  explicit Tape(bool record_gradients = true) : recording_(record_gradients) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }
  std::size_t node_count() const { return nodes_.size(); }

  Var constant(Matrix value);
  /// Leaf bound to `p`; backward() accumulates into p.grad. One leaf per
  /// parameter per tape.
  Var parameter(const Parameter& p);
  Var parameter(const ParamStore& store, std::string_view name);

  const Matrix& value(Var v) const;
  /// Gradient accumulated by the last backward(); zeros if none reached `v`.
  Matrix grad(Var v) const;
  bool requires_grad(Var v) const;

  /// Reverse sweep from a 1x1 `loss`. Parameter leaves add their gradient
  /// into the bound Parameter and mark it populated.
  void backward(Var loss);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double s);
  /// x (n x c) + row (1 x c) broadcast over rows.
  Var add_row(Var x, Var row);
  /// x + s where s is 1 x 1.
  Var add_scalar(Var x, Var s);
  Var relu(Var x);
  Var sigmoid(Var x);
  Var layer_norm(Var x, Var gain, Var bias, double eps);
  Var softmax_rows(Var x);
  Var transpose(Var x);
  Var slice_rows(Var x, std::size_t begin, std::size_t count);
  Var slice_cols(Var x, std::size_t begin, std::size_t count);
  Var concat_rows(std::span<const Var> parts);
  Var concat_cols(std::span<const Var> parts);
  Var gather_rows(Var x, std::span<const std::size_t> indices);
  Var sum(Var x);
  Var mean(Var x);
  /// Cosine similarity of every row of `rows` (k x d) with `target` (1 x d),
  /// as a k x 1 column. Zero-norm rows give 0 with zero gradient.
  Var cosine_rows(Var rows, Var target);
  /// Attaches a precomputed scalar f(input) with known df/dinput.
  Var attach_scalar(Var input, double value, Matrix dvalue_dinput);

 private:
  using Backprop = std::function<void(Tape&, const Matrix& out_grad)>;

  struct Node {
    Matrix value;
    Matrix grad;
    const Parameter* param = nullptr;
    bool requires_grad = false;
    Backprop backprop;
  };

  Var push(Matrix value, std::initializer_list<Var> inputs, Backprop backprop);
  Var push(Matrix value, bool requires_grad, Backprop backprop);
  bool any_requires_grad(std::initializer_list<Var> inputs) const;
  const Node& node(Var v) const;
  void accumulate(Var v, const Matrix& g);

  bool recording_;
  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, Var> param_leaves_;
};

}  // namespace orvos
