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

#ifndef TEMPCAL_SOFTMAX_H_
#define TEMPCAL_SOFTMAX_H_

#include <span>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/matrix.h"

namespace tempcal {

// Affine logit map f -> weight * f + bias. In vector-scaling mode the weight
// is diagonal.
struct AffineParams {
  Matrix weight;
  std::vector<double> bias;

  static AffineParams identity(std::size_t class_count);
  bool operator==(const AffineParams&) const = default;
};

// Softmax of one row at temperature T, written to `out`. Subtracts the row
// max before exponentiating, so |f| up to 1e4 is safe.
void softmax_row(std::span<const double> logits, double temperature,
                 std::span<double> out);

// Throws on T <= 0 or non-finite logits.
ProbabilityMatrix tempered_softmax(const Matrix& logits, double temperature);

Matrix rescale_logits(const Matrix& logits, double w);

Matrix affine_transform(const Matrix& logits, const AffineParams& params);

// Predicted class per row (lowest index on ties).
std::vector<std::size_t> predictions(const Matrix& values);

}  // namespace tempcal

#endif  // TEMPCAL_SOFTMAX_H_
