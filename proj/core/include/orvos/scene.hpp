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
#include <optional>
#include <string>
#include <vector>

#include "orvos/dataset.hpp"
#include "orvos/mask.hpp"

namespace orvos {

/// Palette of the synthetic world. Index 0 is the background.
enum Colour : std::uint8_t {
  kBlack = 0,
  kGray = 1,
  kRed = 2,
  kOrange = 3,
  kYellow = 4,
  kGreen = 5,
  kBlue = 6,
  kPurple = 7,
  kWhite = 8,
};
inline constexpr std::size_t kPaletteSize = 9;

std::string_view colour_name(std::uint8_t colour);

/// Axis-aligned square; (x, y) is its top-left cell.
struct ObjectState {
  int id = 0;
  std::uint8_t colour = kRed;
  int x = 0;
  int y = 0;
  int size = 2;

  friend bool operator==(const ObjectState&, const ObjectState&) = default;
};

struct SceneFrame {
  std::vector<ObjectState> objects;
  /// A one-column gray pillar drawn over the objects.
  std::optional<int> occluder_column;

  friend bool operator==(const SceneFrame&, const SceneFrame&) = default;
};

/// Object trajectories of one video, frame by frame.
struct SceneScript {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<SceneFrame> frames;
};

/// Objects in id order, then the occluder. Throws InvalidArgument if a
/// square leaves the frame.
Frame render(const SceneScript& script, std::size_t frame_index);

/// Visible cells of object `id` in frame `frame_index` (0-based).
BinaryMask visible_mask(const SceneScript& script, std::size_t frame_index, int id);

enum class Rule {
  kHasColour,
  kMostRecentlyColour,
  kLeftmost,
  kRightmost,
  kMoving,
  kMovedMostRecently,
  kTouched,
  kTouchedMostRecently,
};

/// A query's meaning. `colour` names the colour for colour rules and the
/// acting square for touch rules.
struct QueryRule {
  Rule rule = Rule::kHasColour;
  std::uint8_t colour = kRed;
};

/// Referent id per frame (0 = none). A frame has a referent only when
/// exactly one visible square satisfies the rule; "most recently" rules
/// remember the last unique satisfier. Only frames <= t are consulted for
/// frame t. "Moving" is false on the first frame.
std::vector<int> evaluate_rule(const SceneScript& script, const QueryRule& rule);

/// Masks and shift records of `spec` under `rule`.
AnnotatedQuery annotate(const SceneScript& script, const QueryRule& rule, QuerySpec spec);

}  // namespace orvos
