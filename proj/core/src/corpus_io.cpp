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


#include "orvos/corpus_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "orvos/errors.hpp"

namespace orvos {

namespace {

using json = nlohmann::json;

class SchemaReader {
 public:
  explicit SchemaReader(std::string_view source) : source_(source) {}

  json parse(std::string_view text) const {
    try {
      return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      throw FormatError(source_ + ": parse error at byte " + std::to_string(e.byte) + ": " +
                        strip_prefix(e.what()));
    }
  }

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw FormatError(source_ + ": " + path + ": " + what);
  }

  const json& field(const json& obj, const char* key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  std::size_t size(const json& j, const std::string& path) const {
    if (!j.is_number_unsigned()) fail(path, "expected a non-negative integer");
    return j.get<std::size_t>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  const json& array(const json& j, const std::string& path) const {
    if (!j.is_array()) fail(path, "expected an array");
    return j;
  }

  BinaryMask mask(const json& j, std::size_t h, std::size_t w, const std::string& path) const {
    if (j.is_null()) return BinaryMask(h, w);
    RleMask rle;
    for (std::size_t i = 0; i < array(j, path).size(); ++i) {
      const json& run = j[i];
      if (!run.is_number_unsigned() || run.get<std::uint64_t>() > 0xffffffffULL) {
        fail(path + "[" + std::to_string(i) + "]", "expected a non-negative run length");
      }
      rle.runs.push_back(run.get<std::uint32_t>());
    }
    try {
      return decode_rle(rle, h, w);
    } catch (const FormatError& e) {
      fail(path, e.what());
    }
  }

  std::vector<BinaryMask> masks(const json& j, std::size_t t, std::size_t h, std::size_t w,
                                const std::string& path) const {
    if (array(j, path).size() != t) {
      fail(path, "expected " + std::to_string(t) + " masks, found " + std::to_string(j.size()));
    }
    std::vector<BinaryMask> out;
    out.reserve(t);
    for (std::size_t i = 0; i < t; ++i) out.push_back(mask(j[i], h, w, path + "[" + std::to_string(i) + "]"));
    return out;
  }

 private:
  static std::string strip_prefix(const std::string& what) {
    const auto pos = what.find("] ");
    return pos == std::string::npos ? what : what.substr(pos + 2);
  }

  std::string source_;
};

json runs_json(const BinaryMask& m) { return encode_rle(m).runs; }

std::string frame_row(const Frame& f, std::size_t y) {
  std::string row(f.width, '0');
  for (std::size_t x = 0; x < f.width; ++x) {
    const std::uint8_t c = f.at(y, x);
    if (c > 9) throw FormatError("corpus format stores colour indices 0..9 only");
    row[x] = static_cast<char>('0' + c);
  }
  return row;
}

std::vector<std::filesystem::path> json_files(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FormatError(dir.string() + ": not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::string serialize_sample(const AnnotatedSample& s) {
  std::ostringstream os;
  os << "{\n \"video_id\": " << json(s.video_id).dump() << ",\n \"T\": " << s.length << ",\n \"H\": " << s.height
     << ",\n \"W\": " << s.width << ",\n \"frames\": [";
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    json rows = json::array();
    for (std::size_t y = 0; y < s.frames[f].height; ++y) rows.push_back(frame_row(s.frames[f], y));
    os << (f ? ",\n  " : "\n  ") << rows.dump();
  }
  os << "\n ],\n \"queries\": [";
  for (std::size_t qi = 0; qi < s.queries.size(); ++qi) {
    const AnnotatedQuery& q = s.queries[qi];
    os << (qi ? ",\n  {" : "\n  {") << "\"query_id\": " << json(q.spec.query_id).dump()
       << ", \"text\": " << json(q.spec.text).dump() << ", \"category\": " << json(to_string(q.spec.category)).dump()
       << ",\n   \"shifts\": [";
    for (std::size_t r = 0; r < q.shifts.size(); ++r) {
      const ShiftRecord& sr = q.shifts[r];
      os << (r ? ", " : "") << json{{"object_id", sr.object_id}, {"start_frame", sr.start_frame},
                                    {"end_frame", sr.end_frame}}.dump();
    }
    os << "],\n   \"masks\": [";
    for (std::size_t m = 0; m < q.masks.size(); ++m) os << (m ? ",\n    " : "\n    ") << runs_json(q.masks[m]).dump();
    os << "\n   ]}";
  }
  os << "\n ]\n}\n";
  return os.str();
}

AnnotatedSample parse_sample(std::string_view text, std::string_view source) {
  const SchemaReader rd(source);
  const json doc = rd.parse(text);
  AnnotatedSample s;
  s.video_id = rd.string(rd.field(doc, "video_id", "$"), "$.video_id");
  s.length = rd.size(rd.field(doc, "T", "$"), "$.T");
  s.height = rd.size(rd.field(doc, "H", "$"), "$.H");
  s.width = rd.size(rd.field(doc, "W", "$"), "$.W");
  if (s.length == 0 || s.height == 0 || s.width == 0) rd.fail("$", "T, H and W must be positive");

  const json& frames = rd.array(rd.field(doc, "frames", "$"), "$.frames");
  if (frames.size() != s.length) {
    rd.fail("$.frames", "expected " + std::to_string(s.length) + " frames, found " + std::to_string(frames.size()));
  }
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const std::string path = "$.frames[" + std::to_string(f) + "]";
    const json& rows = rd.array(frames[f], path);
    if (rows.size() != s.height) rd.fail(path, "expected " + std::to_string(s.height) + " rows");
    Frame fr(s.height, s.width);
    for (std::size_t y = 0; y < s.height; ++y) {
      const std::string rp = path + "[" + std::to_string(y) + "]";
      const std::string row = rd.string(rows[y], rp);
      if (row.size() != s.width) rd.fail(rp, "expected " + std::to_string(s.width) + " cells");
      for (std::size_t x = 0; x < s.width; ++x) {
        if (row[x] < '0' || row[x] > '9') rd.fail(rp, "cells must be digits 0..9");
        fr.at(y, x) = static_cast<std::uint8_t>(row[x] - '0');
      }
    }
    s.frames.push_back(std::move(fr));
  }

  const json& queries = rd.array(rd.field(doc, "queries", "$"), "$.queries");
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const std::string path = "$.queries[" + std::to_string(qi) + "]";
    const json& jq = queries[qi];
    AnnotatedQuery q;
    q.spec.query_id = rd.string(rd.field(jq, "query_id", path), path + ".query_id");
    q.spec.text = rd.string(rd.field(jq, "text", path), path + ".text");
    const std::string cat = rd.string(rd.field(jq, "category", path), path + ".category");
    try {
      q.spec.category = parse_category(cat);
    } catch (const FormatError& e) {
      rd.fail(path + ".category", e.what());
    }
    q.masks = rd.masks(rd.field(jq, "masks", path), s.length, s.height, s.width, path + ".masks");
    const json& shifts = rd.array(rd.field(jq, "shifts", path), path + ".shifts");
    for (std::size_t r = 0; r < shifts.size(); ++r) {
      const std::string sp = path + ".shifts[" + std::to_string(r) + "]";
      const json& id = rd.field(shifts[r], "object_id", sp);
      if (!id.is_number_integer()) rd.fail(sp + ".object_id", "expected an integer");
      ShiftRecord sr;
      sr.object_id = id.get<int>();
      sr.start_frame = rd.size(rd.field(shifts[r], "start_frame", sp), sp + ".start_frame");
      sr.end_frame = rd.size(rd.field(shifts[r], "end_frame", sp), sp + ".end_frame");
      q.shifts.push_back(sr);
    }
    s.queries.push_back(std::move(q));
  }
  return s;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : corpus) write_file(dir / (s.video_id + ".json"), serialize_sample(s));
}

Corpus load_corpus(const std::filesystem::path& dir) {
  Corpus corpus;
  for (const auto& f : json_files(dir)) corpus.push_back(parse_sample(read_file(f), f.string()));
  return corpus;
}

std::string serialize_predictions(const VideoPredictions& p) {
  std::ostringstream os;
  os << "{\n \"video_id\": " << json(p.video_id).dump() << ",\n \"T\": " << p.length << ",\n \"H\": " << p.height
     << ",\n \"W\": " << p.width << ",\n \"predictions\": {";
  bool first = true;
  for (const auto& [qid, masks] : p.queries) {
    os << (first ? "\n  " : ",\n  ") << json(qid).dump() << ": [";
    first = false;
    for (std::size_t m = 0; m < masks.size(); ++m) os << (m ? ",\n   " : "\n   ") << runs_json(masks[m]).dump();
    os << "\n  ]";
  }
  os << "\n }\n}\n";
  return os.str();
}

VideoPredictions parse_predictions(std::string_view text, std::string_view source) {
  const SchemaReader rd(source);
  const json doc = rd.parse(text);
  VideoPredictions p;
  p.video_id = rd.string(rd.field(doc, "video_id", "$"), "$.video_id");
  p.length = rd.size(rd.field(doc, "T", "$"), "$.T");
  p.height = rd.size(rd.field(doc, "H", "$"), "$.H");
  p.width = rd.size(rd.field(doc, "W", "$"), "$.W");
  const json& preds = rd.field(doc, "predictions", "$");
  if (!preds.is_object()) rd.fail("$.predictions", "expected an object keyed by query id");
  for (const auto& [qid, masks] : preds.items()) {
    p.queries[qid] = rd.masks(masks, p.length, p.height, p.width, "$.predictions." + qid);
  }
  return p;
}

void save_predictions(const PredictionSet& preds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [vid, p] : preds) write_file(dir / (vid + ".json"), serialize_predictions(p));
}

PredictionSet load_predictions(const std::filesystem::path& dir) {
  PredictionSet out;
  for (const auto& f : json_files(dir)) {
    VideoPredictions p = parse_predictions(read_file(f), f.string());
    const std::string id = p.video_id;
    if (!out.emplace(id, std::move(p)).second) throw FormatError(f.string() + ": duplicate video_id '" + id + "'");
  }
  return out;
}

}  // namespace orvos
