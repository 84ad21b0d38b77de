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
#include <span>

#include "orvos/matrix.hpp"

namespace orvos {

inline constexpr double kLayerNormEps = 1e-5;
/// Norm below which a vector is treated as zero by cosine_similarity.
inline constexpr double kZeroNorm = 1e-12;

/// Max-subtracted softmax. Throws InvalidArgument on empty input.
Vector softmax(std::span<const double> x);

/// Cosine similarity; 0 when either operand has norm below kZeroNorm.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Sinusoidal positional encoding for positions 0..count-1.
/// PE(pos, 2i) = sin(pos / 10000^(2i/dim)), PE(pos, 2i+1) = cos(same).
TokenMatrix sinusoidal_pe(std::size_t count, std::size_t dim);

/// Row-wise layer normalization with per-column gain and bias (1 x d each).
Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias,
                  double eps = kLayerNormEps);

double sigmoid(double x);

}  // namespace orvos
