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
#include <iterator>
#include <string>
#include <vector>

#include "orvos/dataset.hpp"
#include "orvos/scene.hpp"

namespace orvos {

struct GeneratorConfig {
  std::size_t videos = 200;
  std::size_t queries_per_video = 1;
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t min_length = 12;
  std::size_t max_length = 96;
  /// Upper bound on squares per video (the touching square not included).
  std::size_t max_objects = 6;
  /// Planned records per query are 1 + Poisson(extra_shift_mean).
  double extra_shift_mean = 2.66;
  /// Chance that a query is planned with an object regaining target status.
  double discontinuous_rate = 0.65;
  /// Chance that a video has a gray pillar in front of the squares.
  double occluder_rate = 0.5;
  /// Share of queries using a "most recently ..." template.
  double memory_query_rate = 0.5;
  std::vector<Category> categories{std::begin(kAllCategories), std::end(kAllCategories)};

  /// Throws ConfigError when no scene can satisfy the configuration.
  void validate() const;
  /// Square side used for this geometry.
  int object_size() const;
  /// Horizontal lanes available for squares.
  std::size_t lanes() const;
};

struct GeneratedVideo {
  SceneScript script;
  std::vector<QueryRule> rules;
  AnnotatedSample sample;
};

/// Query wording for a rule within a category.
std::string query_text(Category category, const QueryRule& rule);

/// Video `index` of the corpus drawn with `seed`; independent of the other videos.
GeneratedVideo generate_video(const GeneratorConfig& config, std::uint64_t seed, std::size_t index);

Corpus generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

}  // namespace orvos
