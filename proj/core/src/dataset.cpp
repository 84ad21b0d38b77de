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

#include "orvos/dataset.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "orvos/errors.hpp"

namespace orvos {

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kAttribute: return "attribute";
    case Category::kSpatial: return "spatial";
    case Category::kAction: return "action";
    case Category::kInteraction: return "interaction";
    case Category::kExternalKnowledge: return "external_knowledge";
  }
  return "unknown";
}

Category parse_category(std::string_view name) {
  for (Category c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  throw FormatError("unknown query category '" + std::string(name) + "'");
}

std::string_view display_name(Category c) {
  switch (c) {
    case Category::kAttribute: return "Attr.";
    case Category::kSpatial: return "Spatial";
    case Category::kAction: return "Action";
    case Category::kInteraction: return "Interact.";
    case Category::kExternalKnowledge: return "Ext. Know.";
  }
  return "?";
}

std::vector<ShiftRecord> shift_records(const std::vector<int>& referent_per_frame) {
  std::vector<ShiftRecord> out;
  for (std::size_t i = 0; i < referent_per_frame.size(); ++i) {
    const int id = referent_per_frame[i];
    if (id == 0) continue;
    const std::size_t frame = i + 1;
    if (!out.empty() && out.back().object_id == id && out.back().end_frame + 1 == frame) {
      out.back().end_frame = frame;
    } else {
      out.push_back({id, frame, frame});
    }
  }
  return out;
}

bool is_discontinuous(const std::vector<ShiftRecord>& shifts) {
  std::map<int, int> per_object;
  for (const auto& s : shifts) {
    if (++per_object[s.object_id] >= 2) return true;
  }
  return false;
}

std::vector<std::string> validate_sample(const AnnotatedSample& s) {
  std::vector<std::string> errors;
  auto fail = [&](const std::string& locus, const std::string& what) {
    errors.push_back(s.video_id + locus + ": " + what);
  };
  if (s.length == 0) fail("", "video has no frames");
  if (s.frames.size() != s.length) {
    fail("", "frame count " + std::to_string(s.frames.size()) + " != T " + std::to_string(s.length));
  }
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    const Frame& fr = s.frames[f];
    if (fr.height != s.height || fr.width != s.width || fr.cells.size() != s.height * s.width) {
      fail(" frame " + std::to_string(f + 1), "geometry does not match the video");
    }
  }
  for (const auto& q : s.queries) {
    const std::string locus = " query " + q.spec.query_id;
    if (q.masks.size() != s.length) {
      fail(locus, "mask count " + std::to_string(q.masks.size()) + " != T " + std::to_string(s.length));
      continue;
    }
    std::vector<int> owner(s.length, 0);
    for (const auto& r : q.shifts) {
      if (r.start_frame < 1 || r.start_frame > r.end_frame || r.end_frame > s.length) {
        fail(locus, "shift record [" + std::to_string(r.start_frame) + ", " +
                        std::to_string(r.end_frame) + "] outside 1.." + std::to_string(s.length));
        continue;
      }
      for (std::size_t t = r.start_frame; t <= r.end_frame; ++t) {
        if (owner[t - 1] != 0) {
          fail(locus, "overlapping shift records at frame " + std::to_string(t));
        }
        owner[t - 1] = r.object_id;
      }
    }
    for (std::size_t t = 0; t < s.length; ++t) {
      const BinaryMask& m = q.masks[t];
      if (m.height != s.height || m.width != s.width || m.cells.size() != s.height * s.width) {
        fail(locus + " frame " + std::to_string(t + 1), "mask geometry does not match the video");
        continue;
      }
      if (owner[t] != 0 && m.none()) {
        fail(locus + " frame " + std::to_string(t + 1), "empty mask inside a shift record");
      }
      if (owner[t] == 0 && !m.none()) {
        fail(locus + " frame " + std::to_string(t + 1), "non-empty mask outside every shift record");
      }
    }
  }
  return errors;
}

CorpusStats corpus_stats(const Corpus& corpus) {
  if (corpus.empty()) throw InvalidArgument("corpus_stats: empty corpus");
  CorpusStats st;
  std::size_t shifts = 0, discontinuous = 0;
  for (const auto& s : corpus) {
    ++st.videos;
    st.frames += s.length;
    for (const auto& q : s.queries) {
      ++st.queries;
      shifts += q.shifts.size();
      if (is_discontinuous(q.shifts)) ++discontinuous;
      ++st.queries_per_category[static_cast<std::size_t>(q.spec.category)];
    }
  }
  st.mean_length = static_cast<double>(st.frames) / static_cast<double>(st.videos);
  if (st.queries > 0) {
    st.mean_shifts_per_query = static_cast<double>(shifts) / static_cast<double>(st.queries);
    st.discontinuous_fraction = static_cast<double>(discontinuous) / static_cast<double>(st.queries);
  }
  return st;
}

}  // namespace orvos
