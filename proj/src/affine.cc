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

#include "tempcal/affine.h"

#include <memory>
#include <string>

#include "tempcal/error.h"
#include "tempcal/metrics.h"

namespace tempcal {

std::vector<double> pack_affine(const AffineParams& params) {
  std::vector<double> packed(params.weight.data().begin(), params.weight.data().end());
  packed.insert(packed.end(), params.bias.begin(), params.bias.end());
  return packed;
}

AffineParams unpack_affine(std::span<const double> packed, std::size_t class_count) {
  const std::size_t k = class_count;
  if (packed.size() != k * k + k) {
    throw Error(ErrorCode::kShapeMismatch, "packed affine parameters have the wrong length");
  }
  AffineParams params{Matrix(k, k), std::vector<double>(packed.begin() + k * k, packed.end())};
  std::copy_n(packed.begin(), k * k, params.weight.data().begin());
  return params;
}

DifferentiableObjective affine_objective(const LogitDataset& calib, double l2_penalty) {
  calib.require_labels();
  if (calib.sample_count() == 0) throw Error(ErrorCode::kEmptyDataset, "empty calibration set");
  auto data = std::make_shared<const LogitDataset>(calib);
  return [data, l2_penalty](std::span<const double> params, std::span<double> gradient) {
    const Matrix& logits = data->logits();
    const Labels& labels = *data->labels();
    const std::size_t k = logits.cols();
    const double* theta = params.data();
    const double* bias = params.data() + k * k;
    std::fill(gradient.begin(), gradient.end(), 0.0);
    double* grad_theta = gradient.data();
    double* grad_bias = gradient.data() + k * k;

    std::vector<double> z(k);
    std::vector<double> probs(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.rows(); ++i) {
      const auto f = logits.row(i);
      for (std::size_t r = 0; r < k; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < k; ++c) acc += theta[r * k + c] * f[c];
        z[r] = acc + bias[r];
      }
      softmax_row(z, 1.0, probs);
      const auto y = static_cast<std::size_t>(labels[i]);
      sum += clamped_neg_log(probs[y]);
      for (std::size_t r = 0; r < k; ++r) {
        const double err = probs[r] - (r == y ? 1.0 : 0.0);
        for (std::size_t c = 0; c < k; ++c) grad_theta[r * k + c] += err * f[c];
        grad_bias[r] += err;
      }
    }
    const auto n = static_cast<double>(logits.rows());
    for (double& g : gradient) g /= n;
    double value = sum / n;
    if (l2_penalty > 0.0) {
      double penalty = 0.0;
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          const double d = theta[r * k + c] - (r == c ? 1.0 : 0.0);
          penalty += d * d;
          grad_theta[r * k + c] += 2.0 * l2_penalty * d;
        }
        penalty += bias[r] * bias[r];
        grad_bias[r] += 2.0 * l2_penalty * bias[r];
      }
      value += l2_penalty * penalty;
    }
    return value;
  };
}

AffineFit fit_affine(const LogitDataset& calib, AffineMode mode, const GradientDescentConfig& cfg) {
  calib.require_labels();
  const std::size_t k = calib.class_count();
  const std::size_t n = calib.sample_count();
  if (n == 0) throw Error(ErrorCode::kEmptyDataset, "empty calibration set");
  if (n < k) {
    throw Error(ErrorCode::kInvalidArgument,
                "affine calibration needs at least as many samples as classes");
  }
  AffineFit fit;
  fit.mode = mode;
  if (mode == AffineMode::kMatrix && n < k * k) {
    fit.warnings.push_back("matrix scaling with " + std::to_string(n) + " samples for " +
                           std::to_string(k * k + k) + " parameters is likely to overfit");
  }

  std::function<void(std::span<double>)> projection;
  if (mode == AffineMode::kVector) {
    projection = [k](std::span<double> gradient) {
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
          if (r != c) gradient[r * k + c] = 0.0;
        }
      }
    };
  }
  const GradientDescentResult result =
      minimize_gd(affine_objective(calib, cfg.l2_penalty),
                  pack_affine(AffineParams::identity(k)), cfg, projection);
  fit.params = unpack_affine(result.params, k);
  fit.final_loss = result.value;
  fit.iterations = result.iterations;
  fit.converged = result.converged;
  return fit;
}

ProbabilityMatrix apply_affine(const LogitDataset& ds, const AffineFit& fit) {
  return tempered_softmax(affine_transform(ds.logits(), fit.params), 1.0);
}

}  // namespace tempcal
