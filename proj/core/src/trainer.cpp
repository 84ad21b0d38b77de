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


#include "orvos/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "orvos/errors.hpp"
#include "orvos/mask_head.hpp"

namespace orvos {

void TrainConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("train: " + what); };
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) fail("betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) fail("weight_decay must be non-negative");
  if (iterations == 0) fail("iterations must be positive");
  if (unroll_cap == 0) fail("unroll_cap must be positive");
  if (!(clip_norm >= 0.0) || !std::isfinite(clip_norm)) fail("clip_norm must be non-negative");
}

double TrainConfig::rate_at(std::size_t step) const {
  if (warmup == 0 || step >= warmup) return learning_rate;
  return learning_rate * static_cast<double>(step) / static_cast<double>(warmup);
}

void adamw_step(ParamStore& params, const TrainConfig& cfg, std::size_t step) {
  if (step == 0) throw InvalidArgument("adamw_step: step index is 1-based");
  bool any = false;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  const double lr = cfg.rate_at(step);
  for (auto& [name, p] : params) {
    if (!p.grad_populated) continue;
    any = true;
    if (p.first_moment.size() != p.value.size()) p.first_moment = Matrix(p.value.rows(), p.value.cols());
    if (p.second_moment.size() != p.value.size()) p.second_moment = Matrix(p.value.rows(), p.value.cols());
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = p.first_moment.data();
    double* v = p.second_moment.data();
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= lr * (m_hat / (std::sqrt(v_hat) + cfg.epsilon) + cfg.weight_decay * w[i]);
    }
  }
  if (!any) throw StateError("adamw_step: no parameter has a gradient; run backward first");
}

double clip_gradients(ParamStore& params, double max_norm) {
  double sq = 0.0;
  for (const auto& [name, p] : params) {
    if (!p.grad_populated) continue;
    for (double g : p.grad.values()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& [name, p] : params) {
      if (!p.grad_populated) continue;
      for (double& g : p.grad.values()) g *= scale;
    }
  }
  return norm;
}

Var segment_loss(Tape& tape, const Model& model, const AnnotatedSample& sample, const AnnotatedQuery& query,
                 std::size_t start, std::size_t steps) {
  if (steps == 0 || start + steps > sample.length) throw InvalidArgument("segment_loss: segment outside the video");
  StreamState warm = init_stream(model, query.spec);
  for (std::size_t t = 0; t < start; ++t) step(model, warm, sample.frames[t]);
  UnrolledStream stream(tape, model, warm);
  std::vector<Var> losses;
  losses.reserve(steps);
  for (std::size_t t = start; t < start + steps; ++t) {
    const StepVars v = stream.step(sample.frames[t]);
    const BinaryMask& gt = query.masks[t];
    const std::size_t cls = gt.none() ? kTargetAbsent : kTargetPresent;
    losses.push_back(composite_loss(tape, v.answer_logits, cls, v.mask_logits, gt));
  }
  return tape.mean(tape.concat_rows(losses));
}

TrainResult train(Model& model, const Corpus& corpus, const TrainConfig& cfg, const TrainProgress& progress) {
  cfg.validate();
  if (corpus.empty()) throw InvalidArgument("train: empty corpus");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t v = 0; v < corpus.size(); ++v) {
    for (std::size_t q = 0; q < corpus[v].queries.size(); ++q) pairs.emplace_back(v, q);
  }
  if (pairs.empty()) throw InvalidArgument("train: corpus has no queries");

  std::mt19937_64 rng(cfg.seed);
  TrainResult result;
  result.losses.reserve(cfg.iterations);
  for (std::size_t it = 1; it <= cfg.iterations; ++it) {
    const auto [v, q] = pairs[std::uniform_int_distribution<std::size_t>(0, pairs.size() - 1)(rng)];
    const AnnotatedSample& sample = corpus[v];
    const std::size_t steps = std::min(cfg.unroll_cap, sample.length);
    const std::size_t start = std::uniform_int_distribution<std::size_t>(0, sample.length - steps)(rng);

    model.params.zero_grad();
    Tape tape;
    const Var loss = segment_loss(tape, model, sample, sample.queries[q], start, steps);
    const double value = tape.value(loss)(0, 0);
    if (!std::isfinite(value)) throw EvaluationError("train: non-finite loss at iteration " + std::to_string(it));
    tape.backward(loss);
    if (cfg.clip_norm > 0.0) clip_gradients(model.params, cfg.clip_norm);
    adamw_step(model.params, cfg, it);
    result.losses.push_back(value);
    if (progress) progress(it, value);
  }
  return result;
}

std::string loss_curve_csv(const TrainResult& result) {
  std::string out = "iteration,loss\n";
  char buf[64];
  for (std::size_t i = 0; i < result.losses.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i + 1, result.losses[i]);
    out += buf;
  }
  return out;
}

std::vector<BinaryMask> ModelPredictor::predict(const AnnotatedSample& sample, const AnnotatedQuery& query) const {
  return run_stream(model_, sample.frames, query.spec, mutant_).masks;
}

std::vector<BinaryMask> OraclePredictor::predict(const AnnotatedSample&, const AnnotatedQuery& query) const {
  return query.masks;
}

std::vector<BinaryMask> EmptyPredictor::predict(const AnnotatedSample& sample, const AnnotatedQuery&) const {
  return std::vector<BinaryMask>(sample.length, BinaryMask(sample.height, sample.width));
}

PredictionSet predict_corpus(const Corpus& corpus, const Predictor& predictor) {
  PredictionSet out;
  for (const auto& s : corpus) {
    VideoPredictions p;
    p.video_id = s.video_id;
    p.length = s.length;
    p.height = s.height;
    p.width = s.width;
    for (const auto& q : s.queries) p.queries[q.spec.query_id] = predictor.predict(s, q);
    out.emplace(s.video_id, std::move(p));
  }
  return out;
}

MetricReport evaluate(const Corpus& corpus, const Predictor& predictor) {
  return score_corpus(corpus, predict_corpus(corpus, predictor));
}

MetricReport evaluate_checkpoint(const ModelConfig& config, const ParamStore& checkpoint, const Corpus& corpus) {
  Model model = Model::create(config, 0);
  model.load(checkpoint);
  return evaluate(corpus, ModelPredictor(model));
}

}  // namespace orvos
