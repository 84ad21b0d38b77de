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


#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "orvos/dataset.hpp"
#include "orvos/errors.hpp"
#include "orvos/generator.hpp"
#include "orvos/scene.hpp"

namespace orvos {
namespace {

// ---------------------------------------------------------------------------
// Reference evaluation of the query rules, written from the rule wording
// over per-cell geometry rather than from the library's interval logic.

std::set<std::pair<int, int>> cells_of(const ObjectState& o) {
  std::set<std::pair<int, int>> s;
  for (int y = o.y; y < o.y + o.size; ++y)
    for (int x = o.x; x < o.x + o.size; ++x) s.insert({y, x});
  return s;
}

bool touch_oracle(const ObjectState& a, const ObjectState& b) {
  const auto ca = cells_of(a), cb = cells_of(b);
  for (auto [y, x] : ca) {
    for (auto [dy, dx] : {std::pair{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}) {
      if (cb.count({y + dy, x + dx})) return true;
    }
  }
  return false;
}

bool visible(const SceneScript& s, std::size_t t, int id) { return !visible_mask(s, t, id).none(); }

const ObjectState* by_id(const SceneFrame& f, int id) {
  for (const auto& o : f.objects)
    if (o.id == id) return &o;
  return nullptr;
}

int instantaneous(const SceneScript& s, std::size_t t, const QueryRule& r) {
  const SceneFrame& f = s.frames[t];
  std::vector<int> hits;
  switch (r.rule) {
    case Rule::kHasColour:
    case Rule::kMostRecentlyColour:
      for (const auto& o : f.objects)
        if (o.colour == r.colour && visible(s, t, o.id)) hits.push_back(o.id);
      break;
    case Rule::kLeftmost:
    case Rule::kRightmost: {
      // Extreme occupied column over the full (unoccluded) squares that are visible.
      std::vector<std::pair<int, int>> edges;
      for (const auto& o : f.objects) {
        if (!visible(s, t, o.id)) continue;
        int e = r.rule == Rule::kLeftmost ? 1 << 20 : -1;
        for (auto [y, x] : cells_of(o)) e = r.rule == Rule::kLeftmost ? std::min(e, x) : std::max(e, x);
        edges.push_back({e, o.id});
      }
      if (edges.empty()) break;
      const int best = r.rule == Rule::kLeftmost ? std::min_element(edges.begin(), edges.end())->first
                                                 : std::max_element(edges.begin(), edges.end())->first;
      for (auto [e, id] : edges)
        if (e == best) hits.push_back(id);
      break;
    }
    case Rule::kMoving:
    case Rule::kMovedMostRecently:
      if (t == 0) break;
      for (const auto& o : f.objects) {
        const ObjectState* p = by_id(s.frames[t - 1], o.id);
        if (p && cells_of(*p) != cells_of(o) && visible(s, t, o.id)) hits.push_back(o.id);
      }
      break;
    case Rule::kTouched:
    case Rule::kTouchedMostRecently: {
      std::vector<const ObjectState*> actors;
      for (const auto& o : f.objects)
        if (o.colour == r.colour) actors.push_back(&o);
      if (actors.size() != 1) break;
      for (const auto& o : f.objects)
        if (o.id != actors[0]->id && touch_oracle(o, *actors[0]) && visible(s, t, o.id)) hits.push_back(o.id);
      break;
    }
  }
  return hits.size() == 1 ? hits[0] : 0;
}

std::vector<int> rule_oracle(const SceneScript& s, const QueryRule& r) {
  const bool memory = r.rule == Rule::kMostRecentlyColour || r.rule == Rule::kMovedMostRecently ||
                      r.rule == Rule::kTouchedMostRecently;
  std::vector<int> out(s.frames.size(), 0);
  int last = 0;
  for (std::size_t t = 0; t < s.frames.size(); ++t) {
    const int now = instantaneous(s, t, r);
    if (!memory) {
      out[t] = now;
      continue;
    }
    if (now) last = now;
    out[t] = last && visible(s, t, last) ? last : 0;
  }
  return out;
}

SceneScript still_script(std::size_t frames) {
  SceneScript s;
  s.height = s.width = 16;
  for (std::size_t t = 0; t < frames; ++t) {
    SceneFrame f;
    f.objects = {ObjectState{1, kRed, 1, 1, 2}, ObjectState{2, kBlue, 10, 8, 2}};
    s.frames.push_back(f);
  }
  return s;
}

TEST(Rules, SquareMovingOnFramesFiveToNine) {
  SceneScript s = still_script(12);
  // 1-based frames 5..9 differ from their predecessor.
  for (std::size_t t = 4; t < 12; ++t) s.frames[t].objects[0].x = 1 + static_cast<int>(std::min<std::size_t>(t, 8) - 3);
  const AnnotatedQuery q = annotate(s, {Rule::kMoving, kRed}, {"q0", "the square that is moving", Category::kAction});
  for (std::size_t t = 0; t < 12; ++t) EXPECT_EQ(!q.masks[t].none(), t >= 4 && t <= 8) << t;
  ASSERT_EQ(q.shifts.size(), 1u);
  EXPECT_EQ(q.shifts[0], (ShiftRecord{1, 5, 9}));
  EXPECT_EQ(evaluate_rule(s, {Rule::kMoving, kRed}), rule_oracle(s, {Rule::kMoving, kRed}));
}

TEST(Rules, TwoSquaresMovingOnDisjointIntervals) {
  SceneScript s = still_script(12);
  for (std::size_t t = 2; t < 12; ++t) s.frames[t].objects[0].x = 1 + static_cast<int>(std::min<std::size_t>(t, 4) - 1);
  for (std::size_t t = 7; t < 12; ++t) s.frames[t].objects[1].y = 8 - static_cast<int>(std::min<std::size_t>(t, 9) - 6);
  const AnnotatedQuery q = annotate(s, {Rule::kMoving, kRed}, {"q0", "", Category::kAction});
  ASSERT_EQ(q.shifts.size(), 2u);
  EXPECT_EQ(q.shifts[0], (ShiftRecord{1, 3, 5}));
  EXPECT_EQ(q.shifts[1], (ShiftRecord{2, 8, 10}));
}

TEST(Rules, MovingIsFalseOnTheFirstFrame) {
  const SceneScript s = still_script(3);
  EXPECT_EQ(evaluate_rule(s, {Rule::kMoving, kRed}), (std::vector<int>{0, 0, 0}));
}

TEST(Rules, MostRecentRulesRememberTheLastUniqueSatisfier) {
  SceneScript s = still_script(6);
  s.frames[2].objects[0].colour = kGreen;  // red square turns green at frame 3
  s.frames[3].objects[0].colour = kGreen;
  s.frames[4].objects[0].colour = kGreen;
  s.frames[4].objects[1].colour = kRed;  // blue square turns red at frame 5
  s.frames[5].objects[0].colour = kGreen;
  const auto got = evaluate_rule(s, {Rule::kMostRecentlyColour, kRed});
  EXPECT_EQ(got, (std::vector<int>{1, 1, 1, 1, 2, 2}));
  EXPECT_EQ(got, rule_oracle(s, {Rule::kMostRecentlyColour, kRed}));
}

TEST(Rules, OcclusionHidesTheReferent) {
  SceneScript s = still_script(2);
  s.frames[1].objects[0].size = 1;
  s.frames[1].occluder_column = 1;
  EXPECT_EQ(evaluate_rule(s, {Rule::kHasColour, kRed}), (std::vector<int>{1, 0}));
  EXPECT_EQ(render(s, 1).at(1, 1), kGray);
}

TEST(Rules, TouchingNeedsASharedEdge) {
  SceneScript s = still_script(3);
  for (auto& f : s.frames) f.objects.push_back(ObjectState{3, kWhite, 0, 0, 2});
  s.frames[0].objects[2].x = 3;   // edge-adjacent to square 1 (x 1..2)
  s.frames[1].objects[2] = ObjectState{3, kWhite, 3, 3, 2};  // diagonal only
  s.frames[2].objects[2] = ObjectState{3, kWhite, 11, 8, 2};  // overlaps square 2
  const QueryRule r{Rule::kTouched, kWhite};
  EXPECT_EQ(evaluate_rule(s, r), (std::vector<int>{1, 0, 2}));
  EXPECT_EQ(evaluate_rule(s, r), rule_oracle(s, r));
}

TEST(Render, RejectsSquaresOutsideTheFrame) {
  SceneScript s = still_script(1);
  s.frames[0].objects[0].x = 15;
  EXPECT_THROW(render(s, 0), InvalidArgument);
}

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.videos = 40;
  c.height = c.width = 16;
  c.min_length = 12;
  c.max_length = 40;
  return c;
}

TEST(Generator, GroundTruthMatchesRuleOracle) {
  const GeneratorConfig c = small_config();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (std::size_t i = 0; i < c.videos; ++i) {
      const GeneratedVideo v = generate_video(c, seed, i);
      ASSERT_EQ(v.rules.size(), v.sample.queries.size());
      for (std::size_t q = 0; q < v.rules.size(); ++q) {
        const std::vector<int> want = rule_oracle(v.script, v.rules[q]);
        EXPECT_EQ(v.sample.queries[q].shifts, shift_records(want)) << seed << "/" << i;
        for (std::size_t t = 0; t < want.size(); ++t) {
          const BinaryMask expect = want[t] ? visible_mask(v.script, t, want[t]) : BinaryMask(c.height, c.width);
          ASSERT_EQ(v.sample.queries[q].masks[t], expect);
        }
      }
      for (std::size_t t = 0; t < v.sample.length; ++t) ASSERT_EQ(v.sample.frames[t], render(v.script, t));
    }
  }
}

TEST(Generator, SamplesAreValidAndDeterministic) {
  GeneratorConfig c = small_config();
  c.queries_per_video = 2;
  const Corpus a = generate_synthetic(c, 5);
  const Corpus b = generate_synthetic(c, 5);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, generate_synthetic(c, 6));
  std::set<std::string> ids;
  for (const auto& s : a) {
    EXPECT_TRUE(validate_sample(s).empty());
    EXPECT_GE(s.length, c.min_length);
    EXPECT_LE(s.length, c.max_length);
    EXPECT_EQ(s.queries.size(), 2u);
    ids.insert(s.video_id);
  }
  EXPECT_EQ(ids.size(), a.size());
  // Each video is a function of (seed, index) alone.
  EXPECT_EQ(generate_video(c, 5, 7).sample, a[7]);
}

TEST(Generator, CategoryFilterAndTemplates) {
  GeneratorConfig c = small_config();
  c.categories = {Category::kInteraction};
  for (const auto& s : generate_synthetic(c, 9)) {
    for (const auto& q : s.queries) {
      EXPECT_EQ(q.spec.category, Category::kInteraction);
      EXPECT_NE(q.spec.text.find("white square"), std::string::npos);
    }
  }
  EXPECT_EQ(query_text(Category::kAttribute, {Rule::kHasColour, kRed}), "the red square");
  EXPECT_EQ(query_text(Category::kExternalKnowledge, {Rule::kHasColour, kBlue}),
            "the square the colour of a clear sky");
  EXPECT_EQ(query_text(Category::kAction, {Rule::kMoving, kRed}), "the square that is moving");
}

TEST(Generator, RejectsInfeasibleConfigs) {
  auto expect_bad = [](auto mutate) {
    GeneratorConfig c = small_config();
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
    EXPECT_THROW(generate_synthetic(c, 1), ConfigError);
  };
  expect_bad([](GeneratorConfig& c) { c.videos = 0; });
  expect_bad([](GeneratorConfig& c) { c.max_objects = 0; });
  expect_bad([](GeneratorConfig& c) { c.min_length = 50; });
  expect_bad([](GeneratorConfig& c) { c.categories.clear(); });
  expect_bad([](GeneratorConfig& c) { c.occluder_rate = 1.5; });
  expect_bad([](GeneratorConfig& c) {
    c.height = 8;
    c.width = 8;
    c.categories = {Category::kInteraction};
  });
}

TEST(Generator, DefaultCorpusStatistics) {
  const CorpusStats st = corpus_stats(generate_synthetic(GeneratorConfig{}, 7));
  EXPECT_EQ(st.queries, 200u);
  EXPECT_NEAR(st.mean_shifts_per_query, 3.66, 0.5);
  EXPECT_NEAR(st.discontinuous_fraction, 0.5586, 0.10);
  for (std::size_t c = 0; c < 5; ++c) EXPECT_GT(st.queries_per_category[c], 0u);
}

}  // namespace
}  // namespace orvos
