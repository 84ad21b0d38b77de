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

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "orvos/corpus_io.hpp"
#include "orvos/dataset.hpp"
#include "orvos/mask.hpp"

namespace orvos {

/// IoU; 1 when both masks are empty, 0 when exactly one is.
double region_similarity(const BinaryMask& pred, const BinaryMask& gt);

/// Cells of the mask with at least one 4-neighbour outside it; the frame
/// border counts as outside.
BinaryMask boundary_cells(const BinaryMask& mask);

/// ceil(0.008 * sqrt(H^2 + W^2)).
double default_boundary_radius(std::size_t height, std::size_t width);

/// Boundary F-measure with Euclidean matching tolerance `radius` (>= 0).
double boundary_f(const BinaryMask& pred, const BinaryMask& gt, double radius);

struct Score {
  double j = 0.0;
  double f = 0.0;
  double jf = 0.0;
  /// Queries averaged into this score.
  std::size_t queries = 0;
};

struct QueryScore {
  std::string video_id;
  std::string query_id;
  Category category = Category::kAttribute;
  double j = 0.0;
  double f = 0.0;
  double jf = 0.0;
};

struct MetricReport {
  std::vector<QueryScore> queries;
  /// Indexed by Category; `queries == 0` marks a category absent from the corpus.
  std::array<Score, 5> categories{};
  Score overall;
};

/// Per-query means over frames, then means over queries. Throws
/// CoverageError when a (video, query, frame) has no prediction.
MetricReport score_corpus(const Corpus& corpus, const PredictionSet& predictions);

struct ShiftWindowReport {
  std::size_t window = 0;
  /// Frames within +-window of some shift record start or end.
  Score boundary;
  Score off_boundary;
  std::size_t boundary_frames = 0;
  std::size_t off_boundary_frames = 0;
};

ShiftWindowReport shift_window_report(const Corpus& corpus, const PredictionSet& predictions, std::size_t window);

/// Long-format CSV: header "scope,category,J,F,JF", an overall row, then
/// optional per-category and shift-window rows.
std::string report_csv(const MetricReport& report, bool per_category, const ShiftWindowReport* shifts = nullptr);

/// Wide CSV with one column per category plus the overall score; rows J, F, JF.
std::string category_table_csv(const MetricReport& report);

/// One-line human summary in the same column order.
std::string category_table_line(const MetricReport& report);

/// Static bar chart of J&F per category and overall.
std::string report_svg(const MetricReport& report);

}  // namespace orvos
