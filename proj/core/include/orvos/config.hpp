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
#include <string>
#include <string_view>

#include "orvos/generator.hpp"
#include "orvos/model.hpp"
#include "orvos/trainer.hpp"

namespace orvos {

struct AuditConfig {
  /// Videos audited by the command line; every prefix is replayed, so cost grows with T^2.
  std::size_t max_videos = 3;
};

/// Everything a reproducible run needs besides its input files.
struct RunConfig {
  std::uint64_t seed = 7;
  ModelConfig model;
  TrainConfig train;
  GeneratorConfig generator;
  AuditConfig audit;

  void validate() const;
};

/// JSON object with optional sections "seed", "model", "train", "generator"
/// and "audit". Missing keys keep their defaults; unknown keys and wrong
/// types throw ConfigError naming the key.
RunConfig parse_run_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_run_config(const std::filesystem::path& path);

/// Every key with its current value, in the format parse_run_config reads.
std::string dump_run_config(const RunConfig& config);

}  // namespace orvos
