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

#include "tempcal/uts.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempcal/error.h"
#include "tempcal/softmax.h"

namespace tempcal {
namespace {

// Per-sample log((1 - S_k) / S_k) under the plain softmax, plus predictions.
// Computed once and reused for every w probed by the search.
struct LogOdds {
  Matrix values;
  std::vector<std::size_t> predicted;
};

LogOdds compute_log_odds(const Matrix& logits) {
  LogOdds out{Matrix(logits.rows(), logits.cols()), predictions(logits)};
  std::vector<double> probs(logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    softmax_row(logits.row(i), 1.0, probs);
    for (std::size_t k = 0; k < logits.cols(); ++k) {
      const double s = std::clamp(probs[k], kWeightClamp, 1.0 - kWeightClamp);
      out.values(i, k) = std::log(1.0 / s - 1.0);
    }
  }
  return out;
}

double weight_from_log_odds(double log_odds, double w) {
  return 1.0 / std::exp((1.0 / w) * log_odds);
}

void check_w(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kInvalidArgument, "w must be positive, got " + std::to_string(w));
  }
}

double mass_objective(const LogOdds& odds, const ClassPriors& priors, double w) {
  const std::size_t k_count = odds.values.cols();
  std::vector<double> mass(k_count, 0.0);
  for (std::size_t i = 0; i < odds.values.rows(); ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      mass[k] += k == odds.predicted[i] ? 1.0 : weight_from_log_odds(odds.values(i, k), w);
    }
  }
  const auto n = static_cast<double>(odds.values.rows());
  double j = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    const double gap = mass[k] / n - 2.0 * priors[k];
    j += gap * gap;
  }
  return j;
}

void check_priors_for(const Matrix& logits, const ClassPriors& priors) {
  if (logits.rows() == 0) throw Error(ErrorCode::kEmptyDataset, "empty calibration set");
  if (priors.size() != logits.cols()) {
    throw Error(ErrorCode::kShapeMismatch,
                "prior vector has " + std::to_string(priors.size()) + " entries for " +
                    std::to_string(logits.cols()) + " classes");
  }
}

}  // namespace

ClassPriors::ClassPriors(std::vector<double> priors) : priors_(std::move(priors)) {
  if (priors_.size() < 2) throw Error(ErrorCode::kInvalidArgument, "priors need at least 2 classes");
  double total = 0.0;
  for (double p : priors_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::kInvalidArgument, "priors must be finite and non-negative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "priors must sum to 1");
  }
}

ClassPriors ClassPriors::uniform(std::size_t class_count) {
  return ClassPriors(std::vector<double>(class_count, 1.0 / static_cast<double>(class_count)));
}

ClassPriors empirical_priors(const LogitDataset& ds) {
  const Labels& labels = ds.require_labels();
  if (labels.empty()) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  std::vector<double> counts(ds.class_count(), 0.0);
  for (Label y : labels) counts[static_cast<std::size_t>(y)] += 1.0;
  for (double& c : counts) c /= static_cast<double>(labels.size());
  return ClassPriors(std::move(counts));
}

WeightMatrix weight_fn(const Matrix& logits, double w) {
  check_w(w);
  const LogOdds odds = compute_log_odds(logits);
  WeightMatrix out{Matrix(logits.rows(), logits.cols()), w};
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    for (std::size_t k = 0; k < logits.cols(); ++k) {
      out.weights(i, k) =
          k == odds.predicted[i] ? 1.0 : weight_from_log_odds(odds.values(i, k), w);
    }
  }
  return out;
}

double weight_mass_objective(const Matrix& logits, const ClassPriors& priors, double w) {
  check_w(w);
  check_priors_for(logits, priors);
  return mass_objective(compute_log_odds(logits), priors, w);
}

double fit_w(const Matrix& logits, const ClassPriors& priors, const ScalarSearchConfig& cfg) {
  check_priors_for(logits, priors);
  if (logits.rows() < logits.cols()) {
    throw Error(ErrorCode::kInvalidArgument,
                "need at least as many samples as classes to fit w (L >= K)");
  }
  const LogOdds odds = compute_log_odds(logits);
  const bool certain_prior = std::any_of(priors.values().begin(), priors.values().end(),
                                         [](double p) { return p >= 1.0 - 1e-12; });
  const bool single_prediction =
      std::all_of(odds.predicted.begin(), odds.predicted.end(),
                  [&](std::size_t p) { return p == odds.predicted.front(); });
  if (certain_prior && single_prediction) {
    throw Error(ErrorCode::kInvalidArgument,
                "degenerate priors: a prior of 1 with a single predicted class");
  }
  return minimize_scalar([&](double w) { return mass_objective(odds, priors, w); }, cfg).argmin;
}

double weighted_nll(const Matrix& logits, const WeightMatrix& weights, double temperature,
                    Reduction reduction) {
  if (weights.weights.rows() != logits.rows() || weights.weights.cols() != logits.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "weight matrix shape does not match logits");
  }
  if (!(temperature > 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be positive");
  std::vector<double> probs(logits.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    softmax_row(logits.row(i), temperature, probs);
    for (std::size_t k = 0; k < logits.cols(); ++k) {
      sum += weights.weights(i, k) * clamped_neg_log(probs[k]);
    }
  }
  if (reduction == Reduction::kSum) return sum;
  if (logits.rows() == 0) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  return sum / static_cast<double>(logits.rows());
}

TemperatureFit fit_uts(const Matrix& logits, const ClassPriors& priors,
                       const ScalarSearchConfig& cfg) {
  const double w = fit_w(logits, priors, cfg);
  const WeightMatrix weights = weight_fn(logits, w);
  const auto objective = [&](double t) {
    return weighted_nll(logits, weights, t, Reduction::kSum);
  };
  const ScalarSearchResult search = minimize_scalar(objective, cfg);

  TemperatureFit fit;
  fit.temperature = search.argmin;
  fit.w_star = w;
  fit.final_loss = search.value;
  fit.iterations = search.iterations;
  fit.converged = search.converged;
  if (auto warning = check_grid_bracket(objective, cfg, search.argmin)) {
    fit.warnings.push_back(*warning);
  }
  return fit;
}

}  // namespace tempcal
