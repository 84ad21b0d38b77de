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

#include "orvos/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "orvos/errors.hpp"

namespace orvos {

namespace {

double evaluate(ParamStore& params, const Objective& objective, bool with_grad) {
  const double loss = objective(params, with_grad);
  if (!std::isfinite(loss)) throw EvaluationError("grad_check: objective is not finite");
  return loss;
}

}  // namespace

GradCheckResult grad_check(ParamStore& params, const Objective& objective,
                           const GradCheckOptions& options) {
  std::vector<std::string> names;
  for (const auto& [name, p] : params) {
    if (p.value.empty()) continue;
    const bool selected =
        options.prefixes.empty() ||
        std::any_of(options.prefixes.begin(), options.prefixes.end(),
                    [&](const std::string& prefix) { return name.starts_with(prefix); });
    if (selected) names.push_back(name);
  }
  if (names.empty()) throw InvalidArgument("grad_check: no parameters selected");

  params.zero_grad();
  evaluate(params, objective, true);

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (std::size_t probe = 0; probe < options.probes; ++probe) {
    const std::string& name =
        names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
    Parameter& p = params.at(name);
    const std::size_t index = std::uniform_int_distribution<std::size_t>(0, p.value.size() - 1)(rng);
    const double analytic = p.grad.values()[index];

    const double original = p.value.values()[index];
    p.value.values()[index] = original + options.step;
    const double up = evaluate(params, objective, false);
    p.value.values()[index] = original - options.step;
    const double down = evaluate(params, objective, false);
    p.value.values()[index] = original;

    const double numeric = (up - down) / (2.0 * options.step);
    const double err = std::abs(analytic - numeric) /
                       std::max({1.0, std::abs(analytic), std::abs(numeric)});
    if (err >= result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_parameter = name;
      result.worst_index = index;
    }
    ++result.probes;
  }
  return result;
}

Objective tape_objective(std::function<Var(Tape&, const ParamStore&)> build) {
  return [build = std::move(build)](ParamStore& params, bool with_grad) {
    Tape tape(with_grad);
    Var loss = build(tape, params);
    if (with_grad) tape.backward(loss);
    return tape.value(loss)(0, 0);
  };
}

}  // namespace orvos
