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
#include <string>
#include <vector>

#include "orvos/mask.hpp"

namespace orvos {

enum class Category { kAttribute, kSpatial, kAction, kInteraction, kExternalKnowledge };

inline constexpr Category kAllCategories[] = {Category::kAttribute, Category::kSpatial,
                                              Category::kAction, Category::kInteraction,
                                              Category::kExternalKnowledge};

/// Serialized names: attribute, spatial, action, interaction, external_knowledge.
std::string_view to_string(Category c);
/// Throws FormatError for anything but the five serialized names.
Category parse_category(std::string_view name);
/// Column label used in report tables.
std::string_view display_name(Category c);

struct QuerySpec {
  std::string query_id;
  std::string text;
  Category category = Category::kAttribute;

  friend bool operator==(const QuerySpec&, const QuerySpec&) = default;
};

/// Maximal run of frames (1-based, inclusive) on which one object is the referent.
struct ShiftRecord {
  int object_id = 0;
  std::size_t start_frame = 0;
  std::size_t end_frame = 0;

  friend bool operator==(const ShiftRecord&, const ShiftRecord&) = default;
};

struct AnnotatedQuery {
  QuerySpec spec;
  /// One ground-truth mask per frame; frames without a referent are empty.
  std::vector<BinaryMask> masks;
  std::vector<ShiftRecord> shifts;

  friend bool operator==(const AnnotatedQuery&, const AnnotatedQuery&) = default;
};

struct AnnotatedSample {
  std::string video_id;
  std::size_t length = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Frame> frames;
  std::vector<AnnotatedQuery> queries;

  friend bool operator==(const AnnotatedSample&, const AnnotatedSample&) = default;
};

using Corpus = std::vector<AnnotatedSample>;

/// Groups per-frame referent ids (0 = none) into shift records.
std::vector<ShiftRecord> shift_records(const std::vector<int>& referent_per_frame);

/// A query is discontinuous when one object owns two or more shift records.
bool is_discontinuous(const std::vector<ShiftRecord>& shifts);

/// Schema violations of one sample, each prefixed with its locus; empty when valid.
std::vector<std::string> validate_sample(const AnnotatedSample& sample);

struct CorpusStats {
  std::size_t videos = 0;
  std::size_t queries = 0;
  std::size_t frames = 0;
  double mean_length = 0.0;
  double mean_shifts_per_query = 0.0;
  double discontinuous_fraction = 0.0;
  std::size_t queries_per_category[5] = {0, 0, 0, 0, 0};
};

/// Throws InvalidArgument on an empty corpus.
CorpusStats corpus_stats(const Corpus& corpus);

}  // namespace orvos
