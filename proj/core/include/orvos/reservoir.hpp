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
#include <ostream>
#include <vector>

#include "orvos/matrix.hpp"

namespace orvos {

/// Which index sampler read_history uses once the store exceeds capacity.
enum class Retention { kDenseToSparse, kUniform };

/// Sorted, duplicate-free 1-based step indices.
using IndexSet = std::vector<std::size_t>;

/// Dense-to-sparse temporal sampling over steps 1..n.
///
/// For n <= n_max every step is kept. Otherwise n_max uniform coordinates
/// u_k = k / (n_max - 1) are warped by phi(u) = 1 - (1 - u)^2 and mapped to
/// t_k = floor(phi(u_k) * (n - 1)) + 1; colliding indices collapse, so the
/// result may hold fewer than n_max entries. The floor is evaluated in exact
/// integer arithmetic. Throws InvalidArgument for n_max < 2 or n == 0.
IndexSet dense_to_sparse_indices(std::size_t n, std::size_t n_max);

/// Evenly spaced retention: t_k = floor(k (n - 1) / (n_max - 1)) + 1.
IndexSet uniform_indices(std::size_t n, std::size_t n_max);

IndexSet sample_indices(Retention retention, std::size_t n, std::size_t n_max);

struct ReservoirEntry {
  std::size_t timestamp = 0;
  Vector token;

  friend bool operator==(const ReservoirEntry&, const ReservoirEntry&) = default;
};

/// Append-only history of fused prompt tokens.
///
/// Capacity applies at read time only. In compacted mode the store itself is
/// resampled over stored positions whenever it exceeds capacity, and reads
/// return every survivor; memory stays bounded but older steps are thinned
/// recursively, so reads differ from full mode once n > n_max.
class TokenReservoir {
 public:
  explicit TokenReservoir(std::size_t n_max = 32, Retention retention = Retention::kDenseToSparse,
                          bool compacted = false);

  void write(Vector token);
  /// Tokens at the sampled indices, oldest first; 0 x d when empty.
  TokenMatrix read_history() const;
  /// Timestamps returned by read_history, in row order.
  IndexSet history_indices() const;

  std::size_t size() const { return entries_.size(); }
  /// Total writes so far (equals size() unless compacted).
  std::size_t steps() const { return steps_; }
  std::size_t capacity() const { return n_max_; }
  std::size_t dim() const { return dim_; }
  Retention retention() const { return retention_; }
  const std::vector<ReservoirEntry>& entries() const { return entries_; }

  /// Debug dump, one "t=<i> [v1, v2, ...]" line per stored entry.
  void dump(std::ostream& out) const;

  friend bool operator==(const TokenReservoir&, const TokenReservoir&) = default;

 private:
  std::size_t n_max_;
  Retention retention_;
  bool compacted_;
  std::size_t dim_ = 0;
  std::size_t steps_ = 0;
  std::vector<ReservoirEntry> entries_;
};

}  // namespace orvos
