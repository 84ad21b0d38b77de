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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "orvos/matrix.hpp"

namespace orvos {

/// One trainable tensor with its gradient buffer and optimizer moments.
///
/// The gradient buffer is mutable: a tape bound to a const store still
/// accumulates into it, while values change only through a mutable store.
struct Parameter {
  Matrix value;
  mutable Matrix grad;
  Matrix first_moment;
  Matrix second_moment;
  /// Set by the tape when a backward pass wrote into `grad`.
  mutable bool grad_populated = false;
};

/// Named parameters, iterated in name order.
///
/// Entries are node-stable: a Parameter reference stays valid while the store
/// lives, which is what lets a Tape bind leaves to them.
class ParamStore {
 public:
  using Map = std::map<std::string, Parameter, std::less<>>;

  Parameter& add(const std::string& name, Matrix init);
  Parameter& at(std::string_view name);
  const Parameter& at(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::size_t tensor_count() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

  /// Copies values from `other`, which must hold exactly the same names and shapes.
  void assign_values(const ParamStore& other);

  Map::iterator begin() { return params_.begin(); }
  Map::iterator end() { return params_.end(); }
  Map::const_iterator begin() const { return params_.begin(); }
  Map::const_iterator end() const { return params_.end(); }

 private:
  Map params_;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Checkpoint container: "ORVS", u32 version, then per tensor in name order
/// u32 name length, name bytes, u32 rank, u64 dims[rank], f64 values; all
/// little-endian.
void write_checkpoint(const ParamStore& params, std::ostream& out);
ParamStore read_checkpoint(std::istream& in);
void save_checkpoint(const ParamStore& params, const std::filesystem::path& path);
ParamStore load_checkpoint(const std::filesystem::path& path);

}  // namespace orvos
