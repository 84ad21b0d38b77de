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


#include "orvos/scene.hpp"

#include <algorithm>

#include "orvos/errors.hpp"

namespace orvos {

namespace {

/// Owner id per cell after drawing: 0 background, -1 occluder.
std::vector<int> ownership(const SceneScript& script, std::size_t frame_index) {
  if (frame_index >= script.frames.size()) throw InvalidArgument("scene: frame index out of range");
  const SceneFrame& f = script.frames[frame_index];
  const int h = static_cast<int>(script.height);
  const int w = static_cast<int>(script.width);
  std::vector<int> owner(script.height * script.width, 0);
  std::vector<const ObjectState*> order;
  for (const auto& o : f.objects) order.push_back(&o);
  std::sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->id < b->id; });
  for (const ObjectState* o : order) {
    if (o->size <= 0 || o->x < 0 || o->y < 0 || o->x + o->size > w || o->y + o->size > h) {
      throw InvalidArgument("scene: square " + std::to_string(o->id) + " leaves the frame");
    }
    for (int y = o->y; y < o->y + o->size; ++y) {
      for (int x = o->x; x < o->x + o->size; ++x) owner[static_cast<std::size_t>(y * w + x)] = o->id;
    }
  }
  if (f.occluder_column && *f.occluder_column >= 0 && *f.occluder_column < w) {
    for (int y = 0; y < h; ++y) owner[static_cast<std::size_t>(y * w + *f.occluder_column)] = -1;
  }
  return owner;
}

const ObjectState* find(const SceneFrame& f, int id) {
  for (const auto& o : f.objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

bool ranges_meet(int a0, int a1, int b0, int b1) { return a0 <= b1 && b0 <= a1; }

bool touching(const ObjectState& a, const ObjectState& b) {
  const int ax1 = a.x + a.size - 1, ay1 = a.y + a.size - 1;
  const int bx1 = b.x + b.size - 1, by1 = b.y + b.size - 1;
  const bool rows = ranges_meet(a.y, ay1, b.y, by1);
  const bool cols = ranges_meet(a.x, ax1, b.x, bx1);
  if (rows && cols) return true;
  if (rows && (ax1 + 1 == b.x || bx1 + 1 == a.x)) return true;
  if (cols && (ay1 + 1 == b.y || by1 + 1 == a.y)) return true;
  return false;
}

int unique_or_zero(const std::vector<int>& ids) { return ids.size() == 1 ? ids.front() : 0; }

/// Unique square satisfying the instantaneous form of the rule, or 0.
int satisfier(const SceneScript& script, std::size_t t, const QueryRule& rule,
              const std::vector<int>& visible_ids) {
  const SceneFrame& f = script.frames[t];
  auto visible = [&](int id) {
    return std::find(visible_ids.begin(), visible_ids.end(), id) != visible_ids.end();
  };
  std::vector<int> hits;
  switch (rule.rule) {
    case Rule::kHasColour:
    case Rule::kMostRecentlyColour:
      for (const auto& o : f.objects) {
        if (o.colour == rule.colour && visible(o.id)) hits.push_back(o.id);
      }
      return unique_or_zero(hits);
    case Rule::kLeftmost:
    case Rule::kRightmost: {
      const bool left = rule.rule == Rule::kLeftmost;
      int best = 0;
      for (const auto& o : f.objects) {
        if (!visible(o.id)) continue;
        const int edge = left ? o.x : o.x + o.size - 1;
        if (hits.empty() || (left ? edge < best : edge > best)) {
          hits.assign(1, o.id);
          best = edge;
        } else if (edge == best) {
          hits.push_back(o.id);
        }
      }
      return unique_or_zero(hits);
    }
    case Rule::kMoving:
    case Rule::kMovedMostRecently:
      if (t == 0) return 0;
      for (const auto& o : f.objects) {
        const ObjectState* prev = find(script.frames[t - 1], o.id);
        if (prev && (prev->x != o.x || prev->y != o.y) && visible(o.id)) hits.push_back(o.id);
      }
      return unique_or_zero(hits);
    case Rule::kTouched:
    case Rule::kTouchedMostRecently: {
      std::vector<const ObjectState*> actors;
      for (const auto& o : f.objects) {
        if (o.colour == rule.colour) actors.push_back(&o);
      }
      if (actors.size() != 1) return 0;
      for (const auto& o : f.objects) {
        if (&o != actors.front() && touching(o, *actors.front()) && visible(o.id)) hits.push_back(o.id);
      }
      return unique_or_zero(hits);
    }
  }
  return 0;
}

bool remembers(Rule r) {
  return r == Rule::kMostRecentlyColour || r == Rule::kMovedMostRecently || r == Rule::kTouchedMostRecently;
}

}  // namespace

std::string_view colour_name(std::uint8_t colour) {
  static constexpr std::string_view kNames[kPaletteSize] = {"black", "gray",  "red",    "orange", "yellow",
                                                            "green", "blue", "purple", "white"};
  if (colour >= kPaletteSize) throw InvalidArgument("colour index out of range");
  return kNames[colour];
}

Frame render(const SceneScript& script, std::size_t frame_index) {
  const std::vector<int> owner = ownership(script, frame_index);
  const SceneFrame& f = script.frames[frame_index];
  Frame out(script.height, script.width);
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] == -1) {
      out.cells[i] = kGray;
    } else if (owner[i] > 0) {
      out.cells[i] = find(f, owner[i])->colour;
    }
  }
  return out;
}

BinaryMask visible_mask(const SceneScript& script, std::size_t frame_index, int id) {
  const std::vector<int> owner = ownership(script, frame_index);
  BinaryMask m(script.height, script.width);
  for (std::size_t i = 0; i < owner.size(); ++i) m.cells[i] = owner[i] == id ? 1 : 0;
  return m;
}

std::vector<int> evaluate_rule(const SceneScript& script, const QueryRule& rule) {
  std::vector<int> out(script.frames.size(), 0);
  int remembered = 0;
  for (std::size_t t = 0; t < script.frames.size(); ++t) {
    const std::vector<int> owner = ownership(script, t);
    std::vector<int> visible_ids;
    for (int id : owner) {
      if (id > 0 && std::find(visible_ids.begin(), visible_ids.end(), id) == visible_ids.end()) {
        visible_ids.push_back(id);
      }
    }
    const int now = satisfier(script, t, rule, visible_ids);
    if (!remembers(rule.rule)) {
      out[t] = now;
      continue;
    }
    if (now != 0) remembered = now;
    const bool seen = std::find(visible_ids.begin(), visible_ids.end(), remembered) != visible_ids.end();
    out[t] = remembered != 0 && seen ? remembered : 0;
  }
  return out;
}

AnnotatedQuery annotate(const SceneScript& script, const QueryRule& rule, QuerySpec spec) {
  AnnotatedQuery q;
  q.spec = std::move(spec);
  const std::vector<int> referents = evaluate_rule(script, rule);
  q.masks.reserve(referents.size());
  for (std::size_t t = 0; t < referents.size(); ++t) {
    q.masks.push_back(referents[t] == 0 ? BinaryMask(script.height, script.width)
                                        : visible_mask(script, t, referents[t]));
  }
  q.shifts = shift_records(referents);
  return q;
}

}  // namespace orvos
