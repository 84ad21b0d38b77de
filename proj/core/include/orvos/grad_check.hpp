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

#include "orvos/params.hpp"
#include "orvos/tape.hpp"

namespace orvos {

/// Scalar objective over a parameter store. When `with_grad` is true it must
/// also accumulate d(loss)/d(parameter) into the store's gradient buffers.
using Objective = std::function<double(ParamStore& params, bool with_grad)>;

struct GradCheckOptions {
  std::size_t probes = 20;
  double step = 1e-5;
  std::uint64_t seed = 0x5eed;
  /// Only probe parameters whose name starts with one of these; empty = all.
  std::vector<std::string> prefixes;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t probes = 0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
};

/// Compares analytic gradients against central differences at randomly chosen
/// coordinates (tensor first, then index, so small tensors are probed too).
/// Error per coordinate is |g_a - g_fd| / max(1, |g_a|, |g_fd|).
/// Throws EvaluationError when the objective is not finite.
GradCheckResult grad_check(ParamStore& params, const Objective& objective,
                           const GradCheckOptions& options = {});

/// Wraps a tape-building function as an Objective.
Objective tape_objective(std::function<Var(Tape&, const ParamStore&)> build);

}  // namespace orvos
