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

#include "orvos/reservoir.hpp"

#include <algorithm>
#include <string>

#include "orvos/errors.hpp"

namespace orvos {

namespace {

void check_args(std::size_t n, std::size_t n_max) {
  if (n_max < 2) {
    throw InvalidArgument("reservoir capacity must be at least 2, got " + std::to_string(n_max));
  }
  if (n == 0) throw InvalidArgument("index sampling needs at least one step");
}

IndexSet all_steps(std::size_t n) {
  IndexSet out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i + 1;
  return out;
}

void collapse(IndexSet& set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

}  // namespace

IndexSet dense_to_sparse_indices(std::size_t n, std::size_t n_max) {
  check_args(n, n_max);
  if (n <= n_max) return all_steps(n);
  // phi(k / m) = (m^2 - (m - k)^2) / m^2 with m = n_max - 1.
  const unsigned long long m = n_max - 1;
  const unsigned long long m2 = m * m;
  IndexSet out;
  out.reserve(n_max);
  for (unsigned long long k = 0; k <= m; ++k) {
    const unsigned long long warped = m2 - (m - k) * (m - k);
    out.push_back(static_cast<std::size_t>(warped * (n - 1) / m2) + 1);
  }
  collapse(out);
  return out;
}

IndexSet uniform_indices(std::size_t n, std::size_t n_max) {
  check_args(n, n_max);
  if (n <= n_max) return all_steps(n);
  const unsigned long long m = n_max - 1;
  IndexSet out;
  out.reserve(n_max);
  for (unsigned long long k = 0; k <= m; ++k) {
    out.push_back(static_cast<std::size_t>(k * (n - 1) / m) + 1);
  }
  collapse(out);
  return out;
}

IndexSet sample_indices(Retention retention, std::size_t n, std::size_t n_max) {
  return retention == Retention::kUniform ? uniform_indices(n, n_max)
                                          : dense_to_sparse_indices(n, n_max);
}

TokenReservoir::TokenReservoir(std::size_t n_max, Retention retention, bool compacted)
    : n_max_(n_max), retention_(retention), compacted_(compacted) {
  if (n_max < 2) {
    throw InvalidArgument("reservoir capacity must be at least 2, got " + std::to_string(n_max));
  }
}

void TokenReservoir::write(Vector token) {
  if (token.empty()) throw ShapeError("reservoir: empty token");
  if (steps_ > 0 && token.size() != dim_) {
    throw ShapeError("reservoir: token width " + std::to_string(token.size()) + ", expected " +
                     std::to_string(dim_));
  }
  dim_ = token.size();
  ++steps_;
  entries_.push_back({steps_, std::move(token)});
  if (compacted_ && entries_.size() > n_max_) {
    // Resample over stored positions; the survivors form the new store.
    const IndexSet keep = sample_indices(retention_, entries_.size(), n_max_);
    std::vector<ReservoirEntry> kept;
    kept.reserve(keep.size());
    for (std::size_t pos : keep) kept.push_back(std::move(entries_[pos - 1]));
    entries_ = std::move(kept);
  }
}

IndexSet TokenReservoir::history_indices() const {
  if (entries_.empty()) return {};
  if (compacted_) {
    IndexSet out;
    for (const auto& e : entries_) out.push_back(e.timestamp);
    return out;
  }
  return sample_indices(retention_, entries_.size(), n_max_);
}

TokenMatrix TokenReservoir::read_history() const {
  const IndexSet idx = history_indices();
  TokenMatrix out(idx.size(), dim_);
  for (std::size_t row = 0; row < idx.size(); ++row) {
    // Full mode stores step t at position t - 1; compacted mode stores only
    // the rows it returns.
    const auto& token = compacted_ ? entries_[row].token : entries_[idx[row] - 1].token;
    std::copy(token.begin(), token.end(), out.row(row).begin());
  }
  return out;
}

void TokenReservoir::dump(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << "t=" << e.timestamp << " [";
    for (std::size_t i = 0; i < e.token.size(); ++i) out << (i ? ", " : "") << e.token[i];
    out << "]\n";
  }
}

}  // namespace orvos
