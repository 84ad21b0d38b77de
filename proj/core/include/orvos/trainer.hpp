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
#include <functional>
#include <string>
#include <vector>

#include "orvos/corpus_io.hpp"
#include "orvos/dataset.hpp"
#include "orvos/metrics.hpp"
#include "orvos/model.hpp"
#include "orvos/stream_engine.hpp"

namespace orvos {

struct TrainConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
  std::size_t iterations = 200;
  std::uint64_t seed = 1;
  /// Recorded steps per sample; earlier frames are replayed without gradients.
  std::size_t unroll_cap = 24;
  /// Global gradient-norm clip applied before the update; 0 disables it.
  double clip_norm = 0.0;
  /// Iterations over which the learning rate ramps linearly up from lr / warmup.
  std::size_t warmup = 0;

  /// Learning rate used at 1-based iteration `step`.
  double rate_at(std::size_t step) const;

  /// Throws ConfigError on non-positive rate, iterations or unroll cap.
  void validate() const;
};

/// Decoupled-weight-decay Adam update with bias correction at rate
/// `config.rate_at(step)`; `step` is 1-based.
/// Tensors the last backward pass did not reach are left untouched. Throws
/// StateError when no tensor holds a gradient.
void adamw_step(ParamStore& params, const TrainConfig& config, std::size_t step);

/// Rescales all populated gradients so their global L2 norm is at most
/// `max_norm`. Returns the norm before clipping.
double clip_gradients(ParamStore& params, double max_norm);

/// Unrolled loss of one (video, query) segment starting at frame `start`
/// (0-based) and covering `steps` frames; the mean of the per-step losses.
Var segment_loss(Tape& tape, const Model& model, const AnnotatedSample& sample, const AnnotatedQuery& query,
                 std::size_t start, std::size_t steps);

struct TrainResult {
  std::vector<double> losses;
};

using TrainProgress = std::function<void(std::size_t iteration, double loss)>;

/// One sampled (video, query) segment per iteration. Deterministic given the seed.
TrainResult train(Model& model, const Corpus& corpus, const TrainConfig& config,
                  const TrainProgress& progress = {});

/// "iteration,loss" rows, 1-based iterations.
std::string loss_curve_csv(const TrainResult& result);

/// Produces one mask per frame for a query, seeing the whole sample.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::vector<BinaryMask> predict(const AnnotatedSample& sample, const AnnotatedQuery& query) const = 0;
};

/// Causal inference with a model.
class ModelPredictor final : public Predictor {
 public:
  explicit ModelPredictor(const Model& model, Mutant mutant = Mutant::kNone) : model_(model), mutant_(mutant) {}
  std::vector<BinaryMask> predict(const AnnotatedSample& sample, const AnnotatedQuery& query) const override;

 private:
  const Model& model_;
  Mutant mutant_;
};

/// Returns the ground truth; a harness sanity check.
class OraclePredictor final : public Predictor {
 public:
  std::vector<BinaryMask> predict(const AnnotatedSample& sample, const AnnotatedQuery& query) const override;
};

/// Predicts no target anywhere; the empty-prediction floor.
class EmptyPredictor final : public Predictor {
 public:
  std::vector<BinaryMask> predict(const AnnotatedSample& sample, const AnnotatedQuery& query) const override;
};

PredictionSet predict_corpus(const Corpus& corpus, const Predictor& predictor);

MetricReport evaluate(const Corpus& corpus, const Predictor& predictor);

/// Loads `checkpoint` into a model shaped by `config` and scores it.
MetricReport evaluate_checkpoint(const ModelConfig& config, const ParamStore& checkpoint, const Corpus& corpus);

}  // namespace orvos
