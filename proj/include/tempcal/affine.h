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

#ifndef TEMPCAL_AFFINE_H_
#define TEMPCAL_AFFINE_H_

#include <string>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/numopt.h"
#include "tempcal/softmax.h"

namespace tempcal {

enum class AffineMode { kMatrix, kVector };

struct AffineFit {
  AffineParams params;
  AffineMode mode = AffineMode::kVector;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

// Parameter vector layout: K*K row-major weight entries, then K biases.
std::vector<double> pack_affine(const AffineParams& params);
AffineParams unpack_affine(std::span<const double> packed, std::size_t class_count);

// Mean NLL of softmax(theta * f + b) plus l2 * (||theta - I||^2 + ||b||^2),
// with its analytic gradient.
DifferentiableObjective affine_objective(const LogitDataset& calib, double l2_penalty);

// Gradient descent from the identity map. Vector mode zeroes off-diagonal
// gradient entries every step, so off-diagonal weights stay exactly 0.
AffineFit fit_affine(const LogitDataset& calib, AffineMode mode,
                     const GradientDescentConfig& cfg = {});

ProbabilityMatrix apply_affine(const LogitDataset& ds, const AffineFit& fit);

}  // namespace tempcal

#endif  // TEMPCAL_AFFINE_H_
