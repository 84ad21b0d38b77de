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


// Command-line front end: gen, train, run, audit, eval, stats, config.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "orvos/config.hpp"
#include "orvos/corpus_io.hpp"
#include "orvos/dataset.hpp"
#include "orvos/errors.hpp"
#include "orvos/generator.hpp"
#include "orvos/metrics.hpp"
#include "orvos/model.hpp"
#include "orvos/params.hpp"
#include "orvos/stream_engine.hpp"
#include "orvos/trainer.hpp"

namespace fs = std::filesystem;
using namespace orvos;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

/// Raised for bad invocations that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig resolve_config(const std::string& path) {
  RunConfig cfg = path.empty() ? RunConfig{} : load_run_config(path);
  cfg.validate();
  return cfg;
}

/// Output directories must not hold stale per-video files from an earlier run.
void prepare_output_dir(const fs::path& dir, bool force) {
  if (!fs::exists(dir)) return;
  if (!fs::is_directory(dir)) throw UsageError(dir.string() + " exists and is not a directory");
  std::vector<fs::path> stale;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") stale.push_back(e.path());
  }
  if (stale.empty()) return;
  if (!force) throw UsageError(dir.string() + " already holds .json files (pass --force to replace them)");
  for (const auto& p : stale) fs::remove(p);
}

Corpus load_nonempty(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw UsageError("no corpus directory at " + dir.string());
  Corpus c = load_corpus(dir);
  if (c.empty()) throw UsageError(dir.string() + " holds no samples");
  return c;
}

Model load_model(const RunConfig& cfg, const fs::path& ckpt) {
  Model m = Model::create(cfg.model, cfg.seed);
  m.load(load_checkpoint(ckpt));
  return m;
}

Mutant parse_mutant(const std::string& name) {
  if (name.empty() || name == "none") return Mutant::kNone;
  if (name == "leak-future") return Mutant::kLeakFuture;
  throw UsageError("unknown mutant '" + name + "' (expected none or leak-future)");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Options {
  std::string config;
  std::string data;
  std::string out;
  std::string ckpt;
  std::string preds;
  std::string report;
  std::string svg;
  std::string table;
  std::string mutant;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_videos;
  std::size_t shift_window = 0;
  bool per_category = false;
  bool force = false;
  bool quiet = false;
};

int cmd_gen(const Options& o) {
  RunConfig cfg = resolve_config(o.config);
  const std::uint64_t seed = o.seed.value_or(cfg.seed);
  prepare_output_dir(o.out, o.force);
  const Corpus corpus = generate_synthetic(cfg.generator, seed);
  std::size_t violations = 0;
  for (const auto& s : corpus) {
    for (const auto& v : validate_sample(s)) {
      std::fprintf(stderr, "%s\n", v.c_str());
      ++violations;
    }
  }
  if (violations) {
    std::fprintf(stderr, "error: generated corpus has %zu schema violations\n", violations);
    return kFailure;
  }
  save_corpus(corpus, o.out);
  const CorpusStats st = corpus_stats(corpus);
  std::printf("wrote %zu videos (%zu queries, mean length %.2f) to %s\n", st.videos, st.queries, st.mean_length,
              o.out.c_str());
  return kOk;
}

int cmd_train(const Options& o) {
  RunConfig cfg = resolve_config(o.config);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.train.seed = *o.seed;
  }
  const Corpus corpus = load_nonempty(o.data);
  Model model = Model::create(cfg.model, cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t every = std::max<std::size_t>(1, cfg.train.iterations / 10);
  double window = 0.0;
  const TrainResult result = train(model, corpus, cfg.train, [&](std::size_t it, double loss) {
    window += loss;
    if (!o.quiet && (it % every == 0 || it == cfg.train.iterations)) {
      const std::size_t n = it % every == 0 ? every : it % every;
      std::fprintf(stderr, "iter %zu/%zu  loss %.4f  %.1fs\n", it, cfg.train.iterations, window / n,
                   seconds_since(t0));
      window = 0.0;
    }
  });
  const fs::path dir(o.out);
  fs::create_directories(dir);
  save_checkpoint(model.params, dir / "model.orvs");
  write_file(dir / "loss.csv", loss_curve_csv(result));
  std::printf("wrote %s and %s (%zu iterations, %.1fs)\n", (dir / "model.orvs").c_str(), (dir / "loss.csv").c_str(),
              result.losses.size(), seconds_since(t0));
  return kOk;
}

int cmd_run(const Options& o) {
  const RunConfig cfg = resolve_config(o.config);
  const Corpus corpus = load_nonempty(o.data);
  const Model model = load_model(cfg, o.ckpt);
  prepare_output_dir(o.out, o.force);
  const auto t0 = std::chrono::steady_clock::now();
  const PredictionSet preds = predict_corpus(corpus, ModelPredictor(model, parse_mutant(o.mutant)));
  save_predictions(preds, o.out);
  std::printf("wrote predictions for %zu videos to %s (%.1fs)\n", preds.size(), o.out.c_str(), seconds_since(t0));
  return kOk;
}

int cmd_audit(const Options& o) {
  const RunConfig cfg = resolve_config(o.config);
  const Corpus corpus = load_nonempty(o.data);
  const Model model = load_model(cfg, o.ckpt);
  const Mutant mutant = parse_mutant(o.mutant);
  const std::size_t limit = std::min(corpus.size(), o.max_videos.value_or(cfg.audit.max_videos));
  std::size_t failures = 0;
  std::size_t checked = 0;
  for (std::size_t v = 0; v < limit; ++v) {
    const AnnotatedSample& s = corpus[v];
    for (const auto& q : s.queries) {
      const AuditReport r = causality_audit(model, s.frames, q.spec, mutant);
      ++checked;
      if (!r.passed) ++failures;
      std::printf("%s/%s: %s\n", s.video_id.c_str(), q.spec.query_id.c_str(), r.summary().c_str());
    }
  }
  std::printf("audit: %zu of %zu queries failed\n", failures, checked);
  return failures ? kFailure : kOk;
}

int cmd_eval(const Options& o) {
  const Corpus corpus = load_nonempty(o.data);
  if (!fs::is_directory(o.preds)) throw UsageError("no prediction directory at " + o.preds);
  const PredictionSet preds = load_predictions(o.preds);
  const MetricReport report = score_corpus(corpus, preds);
  std::optional<ShiftWindowReport> shifts;
  if (o.shift_window > 0) shifts = shift_window_report(corpus, preds, o.shift_window);
  write_file(o.report, report_csv(report, o.per_category, shifts ? &*shifts : nullptr));
  if (!o.table.empty()) write_file(o.table, category_table_csv(report));
  if (!o.svg.empty()) write_file(o.svg, report_svg(report));
  std::printf("%s\n", category_table_line(report).c_str());
  return kOk;
}

int cmd_stats(const Options& o) {
  const Corpus corpus = load_nonempty(o.data);
  std::size_t violations = 0;
  for (const auto& s : corpus) {
    for (const auto& v : validate_sample(s)) {
      std::fprintf(stderr, "%s\n", v.c_str());
      ++violations;
    }
  }
  const CorpusStats st = corpus_stats(corpus);
  std::printf("videos                 %zu\n", st.videos);
  std::printf("queries                %zu\n", st.queries);
  std::printf("frames                 %zu\n", st.frames);
  std::printf("mean length            %.2f\n", st.mean_length);
  std::printf("mean shifts per query  %.3f\n", st.mean_shifts_per_query);
  std::printf("discontinuous          %.2f%%\n", 100.0 * st.discontinuous_fraction);
  for (Category c : kAllCategories) {
    std::printf("  %-20s %zu\n", std::string(display_name(c)).c_str(),
                st.queries_per_category[static_cast<std::size_t>(c)]);
  }
  std::printf("schema violations      %zu\n", violations);
  return violations ? kFailure : kOk;
}

int cmd_config(const Options& o) {
  std::printf("%s\n", dump_run_config(resolve_config(o.config)).c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online video object segmentation with implicit queries: toy-scale pipeline."};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "Output corpus directory")->required();
  gen->add_option("--seed", o.seed, "Overrides the config seed");
  gen->add_flag("--force", o.force, "Replace existing .json files in --out");

  auto* tr = app.add_subcommand("train", "Train a model; writes model.orvs and loss.csv");
  tr->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  tr->add_option("--data", o.data, "Training corpus directory")->required();
  tr->add_option("--out", o.out, "Output directory")->required();
  tr->add_option("--seed", o.seed, "Overrides the init and sampling seeds");
  tr->add_flag("--quiet", o.quiet, "No progress lines");

  auto* run = app.add_subcommand("run", "Causal inference; writes one prediction file per video");
  run->add_option("--config", o.config, "Run configuration the checkpoint was trained with")->check(CLI::ExistingFile);
  run->add_option("--data", o.data, "Corpus directory")->required();
  run->add_option("--ckpt", o.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", o.out, "Prediction directory")->required();
  run->add_flag("--force", o.force, "Replace existing .json files in --out");
  run->add_option("--mutant", o.mutant)->group("");

  auto* audit = app.add_subcommand("audit", "Prefix-determinism audit; exit 1 on any divergence");
  audit->add_option("--config", o.config, "Run configuration the checkpoint was trained with")
      ->check(CLI::ExistingFile);
  audit->add_option("--data", o.data, "Corpus directory")->required();
  audit->add_option("--ckpt", o.ckpt, "Checkpoint file")->required()->check(CLI::ExistingFile);
  audit->add_option("--max-videos", o.max_videos, "Overrides audit.max_videos");
  audit->add_option("--mutant", o.mutant, "Test hook: leak-future")->group("");

  auto* ev = app.add_subcommand("eval", "Score predictions against a corpus");
  ev->add_option("--data", o.data, "Corpus directory")->required();
  ev->add_option("--preds", o.preds, "Prediction directory")->required();
  ev->add_option("--report", o.report, "CSV report path")->required();
  ev->add_flag("--per-category", o.per_category, "Add per-category rows");
  ev->add_option("--shift-window", o.shift_window, "Add rows for frames within W of a referent shift");
  ev->add_option("--table", o.table, "Also write a one-row-per-metric category table (CSV)");
  ev->add_option("--svg", o.svg, "Also write a bar chart (SVG)");

  auto* stats = app.add_subcommand("stats", "Corpus statistics and schema check");
  stats->add_option("--data", o.data, "Corpus directory")->required();

  auto* cfg = app.add_subcommand("config", "Print the resolved configuration with every default");
  cfg->add_option("--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(o);
    if (*tr) return cmd_train(o);
    if (*run) return cmd_run(o);
    if (*audit) return cmd_audit(o);
    if (*ev) return cmd_eval(o);
    if (*stats) return cmd_stats(o);
    if (*cfg) return cmd_config(o);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailure;
  }
  return kUsage;
}
