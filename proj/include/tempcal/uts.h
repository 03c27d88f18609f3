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

#ifndef TEMPCAL_UTS_H_
#define TEMPCAL_UTS_H_

#include <span>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/metrics.h"
#include "tempcal/numopt.h"

namespace tempcal {

// Class marginal q(y). Entries are non-negative and sum to 1 within 1e-9.
class ClassPriors {
 public:
  explicit ClassPriors(std::vector<double> priors);

  static ClassPriors uniform(std::size_t class_count);

  const std::vector<double>& values() const { return priors_; }
  std::size_t size() const { return priors_.size(); }
  double operator[](std::size_t k) const { return priors_[k]; }

  bool operator==(const ClassPriors&) const = default;

 private:
  std::vector<double> priors_;
};

// Label frequencies of a labeled dataset.
ClassPriors empirical_priors(const LogitDataset& ds);

// Per-sample, per-class surrogate weights. The predicted class of every
// sample carries weight exactly 1.
struct WeightMatrix {
  Matrix weights;
  double w_used = 1.0;
};

// Softmax outputs are clamped to [1e-12, 1 - 1e-12] before the odds transform.
inline constexpr double kWeightClamp = 1e-12;

// W_k(x_i; w) = 1 if argmax(logits_i) == k, otherwise
// 1 / exp((1/w) * log(S_k(x_i)^-1 - 1)) with S the plain softmax.
WeightMatrix weight_fn(const Matrix& logits, double w);

// Mean weight mass per class compared against twice the prior:
// J(w) = sum_k ((1/L) sum_i W_k(x_i; w) - 2 q(y=k))^2.
// The factor 2 is the expected mass of the label-based weights: samples
// with y = k contribute q(y=k), the odds-weighted remainder another q(y=k).
double weight_mass_objective(const Matrix& logits, const ClassPriors& priors, double w);

// Minimizes weight_mass_objective over w. Labels are never consulted.
double fit_w(const Matrix& logits, const ClassPriors& priors,
             const ScalarSearchConfig& cfg = {});

// -sum_k sum_i W_ik log S_k(x_i; T), summed or divided by L.
double weighted_nll(const Matrix& logits, const WeightMatrix& weights,
                    double temperature, Reduction reduction = Reduction::kSum);

// Two-step label-free fit: estimate w*, then minimize the summed weighted
// NLL over T. The returned fit carries both temperature and w_star.
TemperatureFit fit_uts(const Matrix& logits, const ClassPriors& priors,
                       const ScalarSearchConfig& cfg = {});

// Dataset overload; only the logits are forwarded, labels are not read.
inline TemperatureFit fit_uts(const LogitDataset& calib, const ClassPriors& priors,
                              const ScalarSearchConfig& cfg = {}) {
  return fit_uts(calib.logits(), priors, cfg);
}

}  // namespace tempcal

#endif  // TEMPCAL_UTS_H_
