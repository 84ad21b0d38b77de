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

#include "orvos/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "orvos/errors.hpp"

namespace orvos {

Vector softmax(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("softmax: empty input");
  const double peak = *std::max_element(x.begin(), x.end());
  Vector out(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("cosine_similarity: lengths " + std::to_string(a.size()) + " and " +
                     std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  if (na < kZeroNorm || nb < kZeroNorm) return 0.0;
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

TokenMatrix sinusoidal_pe(std::size_t count, std::size_t dim) {
  if (dim % 2 != 0) {
    throw InvalidArgument("sinusoidal_pe: dimension must be even, got " + std::to_string(dim));
  }
  TokenMatrix pe(count, dim);
  for (std::size_t pos = 0; pos < count; ++pos) {
    for (std::size_t i = 0; i < dim / 2; ++i) {
      const double angle = static_cast<double>(pos) /
                           std::pow(10000.0, static_cast<double>(2 * i) / static_cast<double>(dim));
      pe(pos, 2 * i) = std::sin(angle);
      pe(pos, 2 * i + 1) = std::cos(angle);
    }
  }
  return pe;
}

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps) {
  const std::size_t d = x.cols();
  if (gain.rows() != 1 || gain.cols() != d || !gain.same_shape(bias)) {
    throw ShapeError("layer_norm: gain/bias must be 1x" + std::to_string(d));
  }
  Matrix out(x.rows(), d);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < d; ++c) {
      out(r, c) = (row[c] - mean) * inv * gain(0, c) + bias(0, c);
    }
  }
  return out;
}

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace orvos
