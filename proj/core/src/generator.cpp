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


#include "orvos/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>

#include "orvos/errors.hpp"

namespace orvos {

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

bool remembers(Rule r) {
  return r == Rule::kMostRecentlyColour || r == Rule::kMovedMostRecently || r == Rule::kTouchedMostRecently;
}

bool is_colour_rule(Rule r) { return r == Rule::kHasColour || r == Rule::kMostRecentlyColour; }
bool is_motion_rule(Rule r) { return r == Rule::kMoving || r == Rule::kMovedMostRecently; }
bool is_touch_rule(Rule r) { return r == Rule::kTouched || r == Rule::kTouchedMostRecently; }
bool is_spatial_rule(Rule r) { return r == Rule::kLeftmost || r == Rule::kRightmost; }

std::string_view colour_fact(std::uint8_t colour) {
  switch (colour) {
    case kRed: return "a ripe tomato";
    case kOrange: return "a pumpkin";
    case kYellow: return "a banana";
    case kGreen: return "fresh grass";
    case kBlue: return "a clear sky";
    case kPurple: return "a plum";
    case kWhite: return "fresh snow";
    default: throw InvalidArgument("no fact for colour " + std::string(colour_name(colour)));
  }
}

Rule pick_rule(Category c, bool memory, Rng& rng) {
  switch (c) {
    case Category::kAttribute:
    case Category::kExternalKnowledge:
      return memory ? Rule::kMostRecentlyColour : Rule::kHasColour;
    case Category::kSpatial:
      return chance(rng, 0.5) ? Rule::kLeftmost : Rule::kRightmost;
    case Category::kAction:
      return memory ? Rule::kMovedMostRecently : Rule::kMoving;
    case Category::kInteraction:
      return memory ? Rule::kTouchedMostRecently : Rule::kTouched;
  }
  return Rule::kHasColour;
}

/// Splits `total` into `parts` non-negative summands, uniformly over compositions.
std::vector<std::size_t> composition(Rng& rng, std::size_t total, std::size_t parts) {
  std::vector<std::size_t> cuts(parts - 1);
  for (auto& c : cuts) c = uniform(rng, 0, total);
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::size_t> out(parts);
  std::size_t prev = 0;
  for (std::size_t i = 0; i + 1 < parts; ++i) {
    out[i] = cuts[i] - prev;
    prev = cuts[i];
  }
  out[parts - 1] = total - prev;
  return out;
}

/// Planned referent interval; `object` indexes the squares, frames are 1-based.
struct Record {
  std::size_t object = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  /// Frames from `start` on which the triggering event happens ("most recently" rules).
  std::size_t active = 0;
};

struct Plan {
  std::size_t objects = 2;
  std::vector<Record> records;
};

Plan plan_records(const GeneratorConfig& cfg, Rule rule, std::size_t length, std::size_t max_objects, Rng& rng) {
  const bool persist = remembers(rule);
  const std::size_t first = is_motion_rule(rule) ? 2 : 1;
  const std::size_t frames = length - first + 1;

  std::size_t count = 1;
  if (cfg.extra_shift_mean > 0.0) {
    count += static_cast<std::size_t>(std::poisson_distribution<int>(cfg.extra_shift_mean)(rng));
  }
  count = std::min({count, frames, std::size_t{12}});

  bool disc = chance(rng, cfg.discontinuous_rate) || count > max_objects;
  const bool feasible = persist ? count >= 3 : (count >= 2 && frames >= 3);
  if (!feasible) disc = false;
  if (!disc) count = std::min(count, max_objects);

  Plan plan;
  std::vector<std::size_t> sequence(count);
  if (!disc) {
    plan.objects = uniform(rng, std::max<std::size_t>(2, count), max_objects);
    std::vector<std::size_t> ids(plan.objects);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    std::copy_n(ids.begin(), count, sequence.begin());
  } else {
    const std::size_t pool_size =
        count == 2 ? 1 : uniform(rng, 2, std::min(max_objects, count - 1));
    plan.objects = uniform(rng, std::max<std::size_t>(2, pool_size), max_objects);
    std::vector<std::size_t> ids(plan.objects);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(pool_size);
    sequence[0] = ids[uniform(rng, 0, pool_size - 1)];
    for (std::size_t i = 1; i < count; ++i) {
      if (pool_size == 1) {
        sequence[i] = ids[0];
        continue;
      }
      std::size_t pick = ids[uniform(rng, 0, pool_size - 2)];
      if (pick == sequence[i - 1]) pick = ids[pool_size - 1];
      sequence[i] = pick;
    }
  }

  std::vector<std::size_t> min_gap(count, 0);
  std::size_t mandatory = count;
  for (std::size_t i = 0; i + 1 < count; ++i) {
    min_gap[i] = sequence[i] == sequence[i + 1] ? 1 : 0;
    mandatory += min_gap[i];
  }
  const std::size_t parts = persist ? count + 1 : 2 * count + 1;
  const std::vector<std::size_t> extra = composition(rng, frames - mandatory, parts);

  std::size_t cursor = first + extra[0];
  for (std::size_t i = 0; i < count; ++i) {
    Record r;
    r.object = sequence[i];
    r.start = cursor;
    r.end = cursor + extra[1 + i];
    if (persist && i + 1 == count) r.end = length;
    r.active = uniform(rng, 1, r.end - r.start + 1);
    plan.records.push_back(r);
    cursor = r.end + 1;
    if (!persist && i + 1 < count) cursor += min_gap[i] + extra[1 + count + i];
  }
  return plan;
}

/// Object index holding the event at frame t (1-based), if any.
std::optional<std::size_t> active_object(const Plan& plan, Rule rule, std::size_t t) {
  for (const auto& r : plan.records) {
    const std::size_t last = remembers(rule) ? r.start + r.active - 1 : r.end;
    if (t >= r.start && t <= last) return r.object;
  }
  return std::nullopt;
}

/// Column of the left edge for every square in one spatial segment.
/// `winner` holds the extreme edge alone; with no winner two squares tie.
std::vector<int> spatial_layout(std::size_t n, std::optional<std::size_t> winner, bool leftmost, int width,
                                int size, Rng& rng) {
  std::vector<int> x(n);
  const int edge = uniform_int(rng, 0, 2);
  std::vector<std::size_t> leaders;
  if (winner) {
    leaders.push_back(*winner);
  } else {
    std::vector<std::size_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::shuffle(ids.begin(), ids.end(), rng);
    leaders = {ids[0], ids[1]};
  }
  for (std::size_t i = 0; i < n; ++i) {
    const bool lead = std::find(leaders.begin(), leaders.end(), i) != leaders.end();
    x[i] = lead ? edge : uniform_int(rng, edge + 1, width - size);
    if (!leftmost) x[i] = width - size - x[i];
  }
  return x;
}

}  // namespace

int GeneratorConfig::object_size() const {
  return std::max(2, static_cast<int>(std::min(height, width) / 10));
}

std::size_t GeneratorConfig::lanes() const {
  return (height + 1) / static_cast<std::size_t>(object_size() + 1);
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("generator: " + what); };
  if (videos == 0) fail("videos must be positive");
  if (queries_per_video == 0) fail("queries_per_video must be positive");
  if (height < 8 || width < 8) fail("frames must be at least 8x8");
  if (height > 256 || width > 256) fail("frames must be at most 256x256");
  if (min_length < 4 || min_length > max_length) fail("length range must satisfy 4 <= min_length <= max_length");
  if (categories.empty()) fail("at least one query category is required");
  for (double p : {discontinuous_rate, occluder_rate, memory_query_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) fail("rates must lie in [0, 1]");
  }
  if (!(extra_shift_mean >= 0.0 && extra_shift_mean <= 64.0)) fail("extra_shift_mean must lie in [0, 64]");
  if (max_objects < 2) fail("at least two squares per video are required");
  if (max_objects > 6) fail("at most six squares per video are supported");
  if (lanes() < 2) fail("frame too small for two lanes of squares");
  const bool touch = std::find(categories.begin(), categories.end(), Category::kInteraction) != categories.end();
  if (touch && lanes() < 3) fail("interaction queries need a third lane for the touching square");
  if (width < static_cast<std::size_t>(3 * object_size() + 3)) fail("frame too narrow for the scripted motions");
}

std::string query_text(Category category, const QueryRule& rule) {
  const bool fact = category == Category::kExternalKnowledge;
  switch (rule.rule) {
    case Rule::kHasColour:
      return fact ? "the square the colour of " + std::string(colour_fact(rule.colour))
                  : "the " + std::string(colour_name(rule.colour)) + " square";
    case Rule::kMostRecentlyColour:
      return fact ? "the square that was most recently the colour of " + std::string(colour_fact(rule.colour))
                  : "the square that was most recently " + std::string(colour_name(rule.colour));
    case Rule::kLeftmost: return "the leftmost square";
    case Rule::kRightmost: return "the rightmost square";
    case Rule::kMoving: return "the square that is moving";
    case Rule::kMovedMostRecently: return "the square that moved most recently";
    case Rule::kTouched:
      return "the square that the " + std::string(colour_name(rule.colour)) + " square is touching";
    case Rule::kTouchedMostRecently:
      return "the square that the " + std::string(colour_name(rule.colour)) + " square touched most recently";
  }
  return {};
}

GeneratedVideo generate_video(const GeneratorConfig& cfg, std::uint64_t seed, std::size_t index) {
  cfg.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  Rng rng(seq);

  const std::size_t length = uniform(rng, cfg.min_length, cfg.max_length);
  const int size = cfg.object_size();
  const int width = static_cast<int>(cfg.width);

  const Category category = cfg.categories[uniform(rng, 0, cfg.categories.size() - 1)];
  QueryRule rule;
  rule.rule = pick_rule(category, chance(rng, cfg.memory_query_rate), rng);
  rule.colour = is_touch_rule(rule.rule) ? std::uint8_t{kWhite} : static_cast<std::uint8_t>(uniform(rng, kRed, kWhite));

  const std::size_t lane_budget = cfg.lanes() - (is_touch_rule(rule.rule) ? 1 : 0);
  const std::size_t max_objects = std::min(cfg.max_objects, lane_budget);
  const Plan plan = plan_records(cfg, rule.rule, length, max_objects, rng);
  const std::size_t n = plan.objects;

  std::vector<std::size_t> lanes(cfg.lanes());
  std::iota(lanes.begin(), lanes.end(), 0);
  std::shuffle(lanes.begin(), lanes.end(), rng);

  std::vector<std::uint8_t> palette;
  for (std::uint8_t c = kRed; c <= kWhite; ++c) {
    if (is_colour_rule(rule.rule) && c == rule.colour) continue;
    if (is_touch_rule(rule.rule) && c == kWhite) continue;
    palette.push_back(c);
  }
  std::shuffle(palette.begin(), palette.end(), rng);

  const int max_x = is_touch_rule(rule.rule) ? width - 2 * size : width - size;
  SceneFrame state;
  std::vector<int> direction(n);
  for (std::size_t i = 0; i < n; ++i) {
    ObjectState o;
    o.id = static_cast<int>(i) + 1;
    o.colour = palette[i];
    o.size = size;
    o.x = uniform_int(rng, 0, max_x);
    o.y = static_cast<int>(lanes[i]) * (size + 1);
    state.objects.push_back(o);
    direction[i] = chance(rng, 0.5) ? 1 : -1;
  }
  const int park_y = static_cast<int>(lanes[n % lanes.size()]) * (size + 1);
  const int park_x = uniform_int(rng, 0, width - size);
  if (is_touch_rule(rule.rule)) {
    state.objects.push_back({static_cast<int>(n) + 1, kWhite, park_x, park_y, size});
  }
  if (chance(rng, cfg.occluder_rate)) state.occluder_column = uniform_int(rng, 0, width - 1);

  auto step_x = [&](std::size_t i) {
    ObjectState& o = state.objects[i];
    if (o.x + direction[i] < 0 || o.x + direction[i] > width - size) direction[i] = -direction[i];
    o.x += direction[i];
  };

  GeneratedVideo out;
  out.script.height = cfg.height;
  out.script.width = cfg.width;
  std::optional<std::size_t> segment_winner;
  bool segment_open = false;
  for (std::size_t t = 1; t <= length; ++t) {
    const std::optional<std::size_t> active = active_object(plan, rule.rule, t);
    if (is_motion_rule(rule.rule)) {
      if (active && t > 1) step_x(*active);
    } else if (is_colour_rule(rule.rule)) {
      for (std::size_t i = 0; i < n; ++i) {
        state.objects[i].colour = active == i ? rule.colour : palette[i];
        if (t > 1 && chance(rng, 0.1)) step_x(i);
      }
    } else if (is_spatial_rule(rule.rule)) {
      if (!segment_open || active != segment_winner) {
        const auto x = spatial_layout(n, active, rule.rule == Rule::kLeftmost, width, size, rng);
        for (std::size_t i = 0; i < n; ++i) state.objects[i].x = x[i];
        segment_winner = active;
        segment_open = true;
      }
    } else {
      ObjectState& actor = state.objects[n];
      if (active) {
        actor.x = state.objects[*active].x + size;
        actor.y = state.objects[*active].y;
      } else {
        actor.x = park_x;
        actor.y = park_y;
      }
    }
    out.script.frames.push_back(state);
  }

  AnnotatedSample& sample = out.sample;
  char id[32];
  std::snprintf(id, sizeof id, "v%05zu", index);
  sample.video_id = id;
  sample.length = length;
  sample.height = cfg.height;
  sample.width = cfg.width;
  for (std::size_t t = 0; t < length; ++t) sample.frames.push_back(render(out.script, t));

  out.rules.push_back(rule);
  sample.queries.push_back(annotate(out.script, rule, {"q0", query_text(category, rule), category}));
  for (std::size_t q = 1; q < cfg.queries_per_video; ++q) {
    const Category c = cfg.categories[uniform(rng, 0, cfg.categories.size() - 1)];
    QueryRule extra;
    extra.rule = pick_rule(c, chance(rng, cfg.memory_query_rate), rng);
    extra.colour = is_touch_rule(extra.rule) ? std::uint8_t{kWhite} : palette[uniform(rng, 0, n - 1)];
    out.rules.push_back(extra);
    sample.queries.push_back(
        annotate(out.script, extra, {"q" + std::to_string(q), query_text(c, extra), c}));
  }
  return out;
}

Corpus generate_synthetic(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Corpus corpus;
  corpus.reserve(cfg.videos);
  for (std::size_t i = 0; i < cfg.videos; ++i) corpus.push_back(generate_video(cfg, seed, i).sample);
  return corpus;
}

}  // namespace orvos
