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


#include "orvos/config.hpp"

#include <functional>
#include <map>

#include "json.hpp"
#include "orvos/corpus_io.hpp"
#include "orvos/errors.hpp"

namespace orvos {

namespace {

using json = nlohmann::json;

/// Binds JSON keys of one section to fields, in both directions.
class Section {
 public:
  explicit Section(std::string name) : name_(std::move(name)) {}

  void size(const char* key, std::size_t& field) {
    bind(key, [&field](const json& j) { return j.is_number_unsigned() ? (field = j.get<std::size_t>(), true) : false; },
         [&field] { return json(field); });
  }
  void u64(const char* key, std::uint64_t& field) {
    bind(key, [&field](const json& j) { return j.is_number_unsigned() ? (field = j.get<std::uint64_t>(), true) : false; },
         [&field] { return json(field); });
  }
  void real(const char* key, double& field) {
    bind(key, [&field](const json& j) { return j.is_number() ? (field = j.get<double>(), true) : false; },
         [&field] { return json(field); });
  }
  void flag(const char* key, bool& field) {
    bind(key, [&field](const json& j) { return j.is_boolean() ? (field = j.get<bool>(), true) : false; },
         [&field] { return json(field); });
  }
  void custom(const char* key, std::function<bool(const json&)> read, std::function<json()> write) {
    bind(key, std::move(read), std::move(write));
  }

  void read(const json& obj) const {
    if (!obj.is_object()) throw ConfigError("config: section '" + name_ + "' must be an object");
    for (const auto& [key, value] : obj.items()) {
      auto it = readers_.find(key);
      if (it == readers_.end()) throw ConfigError("config: unknown key '" + name_ + "." + key + "'");
      bool ok = false;
      try {
        ok = it->second(value);
      } catch (const ConfigError& e) {
        throw ConfigError("config: key '" + name_ + "." + key + "': " + e.what());
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) throw ConfigError("config: key '" + name_ + "." + key + "' has the wrong type or value");
    }
  }

  json write() const {
    json out = json::object();
    for (const auto& [key, w] : writers_) out[key] = w();
    return out;
  }

 private:
  void bind(const char* key, std::function<bool(const json&)> read, std::function<json()> write) {
    readers_[key] = std::move(read);
    writers_.emplace_back(key, std::move(write));
  }

  std::string name_;
  std::map<std::string, std::function<bool(const json&)>> readers_;
  std::vector<std::pair<std::string, std::function<json()>>> writers_;
};

Section model_section(ModelConfig& m) {
  Section s("model");
  s.size("palette", m.palette);
  s.size("feature_stride", m.feature_stride);
  s.size("dim", m.dim);
  s.size("visual_dim", m.visual_dim);
  s.size("context_frames", m.context_frames);
  s.size("memory_tokens", m.memory_tokens);
  s.size("reservoir_capacity", m.reservoir_capacity);
  s.flag("compact_reservoir", m.compact_reservoir);
  s.size("aggregator_heads", m.aggregator_heads);
  s.size("aggregator_layers", m.aggregator_layers);
  s.size("reasoner_heads", m.reasoner_heads);
  s.size("reasoner_layers", m.reasoner_layers);
  s.size("ffn_multiplier", m.ffn_multiplier);
  s.size("instruction_tokens", m.instruction_tokens);
  s.size("query_buckets", m.query_buckets);
  s.real("fusion_lambda", m.fusion_lambda);
  s.custom(
      "arm",
      [&m](const json& j) {
        if (!j.is_string()) return false;
        m.arm = parse_arm(j.get<std::string>());
        return true;
      },
      [&m] { return json(std::string(to_string(m.arm))); });
  return s;
}

Section train_section(TrainConfig& t) {
  Section s("train");
  s.real("learning_rate", t.learning_rate);
  s.real("beta1", t.beta1);
  s.real("beta2", t.beta2);
  s.real("epsilon", t.epsilon);
  s.real("weight_decay", t.weight_decay);
  s.size("iterations", t.iterations);
  s.u64("seed", t.seed);
  s.size("unroll_cap", t.unroll_cap);
  s.real("clip_norm", t.clip_norm);
  s.size("warmup", t.warmup);
  return s;
}

Section generator_section(GeneratorConfig& g) {
  Section s("generator");
  s.size("videos", g.videos);
  s.size("queries_per_video", g.queries_per_video);
  s.size("height", g.height);
  s.size("width", g.width);
  s.size("min_length", g.min_length);
  s.size("max_length", g.max_length);
  s.size("max_objects", g.max_objects);
  s.real("extra_shift_mean", g.extra_shift_mean);
  s.real("discontinuous_rate", g.discontinuous_rate);
  s.real("occluder_rate", g.occluder_rate);
  s.real("memory_query_rate", g.memory_query_rate);
  s.custom(
      "categories",
      [&g](const json& j) {
        if (!j.is_array()) return false;
        std::vector<Category> cats;
        for (const auto& c : j) {
          if (!c.is_string()) return false;
          try {
            cats.push_back(parse_category(c.get<std::string>()));
          } catch (const FormatError& e) {
            throw ConfigError(e.what());
          }
        }
        g.categories = std::move(cats);
        return true;
      },
      [&g] {
        json out = json::array();
        for (Category c : g.categories) out.push_back(std::string(to_string(c)));
        return out;
      });
  return s;
}

Section audit_section(AuditConfig& a) {
  Section s("audit");
  s.size("max_videos", a.max_videos);
  return s;
}

}  // namespace

void RunConfig::validate() const {
  model.validate();
  train.validate();
  generator.validate();
  if (model.palette < kPaletteSize) {
    throw ConfigError("config: model.palette must cover the generator's " + std::to_string(kPaletteSize) + " colours");
  }
}

RunConfig parse_run_config(std::string_view text, std::string_view source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string(source) + ": parse error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw ConfigError(std::string(source) + ": top level must be an object");
  RunConfig cfg;
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed") {
      if (!value.is_number_unsigned()) throw ConfigError("config: key 'seed' must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "model") {
      model_section(cfg.model).read(value);
    } else if (key == "train") {
      train_section(cfg.train).read(value);
    } else if (key == "generator") {
      generator_section(cfg.generator).read(value);
    } else if (key == "audit") {
      audit_section(cfg.audit).read(value);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text, path.string());
}

std::string dump_run_config(const RunConfig& config) {
  RunConfig c = config;
  json out = json::object();
  out["seed"] = c.seed;
  out["model"] = model_section(c.model).write();
  out["train"] = train_section(c.train).write();
  out["generator"] = generator_section(c.generator).write();
  out["audit"] = audit_section(c.audit).write();
  return out.dump(2) + "\n";
}

}  // namespace orvos
