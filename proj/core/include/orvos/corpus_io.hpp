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

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "orvos/dataset.hpp"

namespace orvos {

/// One JSON document per video:
///   {"video_id", "T", "H", "W",
///    "frames": [[row string of colour digits, ...], ...],
///    "queries": [{"query_id", "text", "category",
///                 "masks": [run-length array or null, ...],
///                 "shifts": [{"object_id", "start_frame", "end_frame"}, ...]}]}
/// Masks are written as runs; null is accepted as an empty mask.
std::string serialize_sample(const AnnotatedSample& sample);
/// Throws FormatError naming `source` and the byte offset or field path.
AnnotatedSample parse_sample(std::string_view text, std::string_view source);

/// Writes <video_id>.json per video into `dir` (created if missing).
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir);
/// Reads every *.json in `dir`, ordered by file name. Throws FormatError.
Corpus load_corpus(const std::filesystem::path& dir);

/// Predicted masks of one video, keyed by query id.
struct VideoPredictions {
  std::string video_id;
  std::size_t length = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::map<std::string, std::vector<BinaryMask>> queries;

  friend bool operator==(const VideoPredictions&, const VideoPredictions&) = default;
};

/// Predictions keyed by video id.
using PredictionSet = std::map<std::string, VideoPredictions>;

std::string serialize_predictions(const VideoPredictions& preds);
VideoPredictions parse_predictions(std::string_view text, std::string_view source);
void save_predictions(const PredictionSet& preds, const std::filesystem::path& dir);
PredictionSet load_predictions(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace orvos
