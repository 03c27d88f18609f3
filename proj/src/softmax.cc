/*
 * Copyright 2026 The tempcal Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "tempcal/softmax.h"

#include <cmath>
#include <string>

#include "tempcal/error.h"

namespace tempcal {

AffineParams AffineParams::identity(std::size_t class_count) {
  return {Matrix::identity(class_count), std::vector<double>(class_count, 0.0)};
}

void softmax_row(std::span<const double> logits, double temperature, std::span<double> out) {
  const double top = logits[argmax(logits)];
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    out[k] = std::exp((logits[k] - top) / temperature);
    total += out[k];
  }
  for (double& p : out) p /= total;
}

ProbabilityMatrix tempered_softmax(const Matrix& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument,
                "temperature must be positive and finite, got " + std::to_string(temperature));
  }
  Matrix probs(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    for (double f : logits.row(r)) {
      if (!std::isfinite(f)) {
        throw Error(ErrorCode::kNonFinite, "non-finite logit in row " + std::to_string(r));
      }
    }
    softmax_row(logits.row(r), temperature, probs.row(r));
  }
  return ProbabilityMatrix(std::move(probs));
}

Matrix rescale_logits(const Matrix& logits, double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument,
                "rescale factor must be positive, got " + std::to_string(w));
  }
  Matrix out = logits;
  for (double& v : out.data()) v *= w;
  return out;
}

Matrix affine_transform(const Matrix& logits, const AffineParams& params) {
  const std::size_t k = logits.cols();
  if (params.weight.rows() != k || params.weight.cols() != k || params.bias.size() != k) {
    throw Error(ErrorCode::kShapeMismatch,
                "affine parameters do not match class count " + std::to_string(k));
  }
  Matrix out(logits.rows(), k);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto f = logits.row(r);
    for (std::size_t i = 0; i < k; ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < k; ++j) z += params.weight(i, j) * f[j];
      out(r, i) = z + params.bias[i];
    }
  }
  return out;
}

std::vector<std::size_t> predictions(const Matrix& values) {
  std::vector<std::size_t> out(values.rows());
  for (std::size_t r = 0; r < values.rows(); ++r) out[r] = argmax(values.row(r));
  return out;
}

}  // namespace tempcal
