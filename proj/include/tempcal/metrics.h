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

#ifndef TEMPCAL_METRICS_H_
#define TEMPCAL_METRICS_H_

#include <cstddef>
#include <vector>

#include "tempcal/dataset.h"

namespace tempcal {

enum class Reduction { kMean, kSum };

// Probabilities are floored at this value before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr int kDefaultBinCount = 15;

// -log(max(p, kProbabilityFloor)).
double clamped_neg_log(double p);

// Equal-width confidence bins over (0, 1]. Bin b (0-based) covers
// (b/B, (b+1)/B]; confidence 0 falls in the first bin.
struct ReliabilityBins {
  int bin_count = kDefaultBinCount;
  std::vector<std::size_t> sample_count;
  std::vector<double> mean_confidence;  // 0 for empty bins
  std::vector<double> accuracy;         // 0 for empty bins

  double lower_edge(int b) const { return static_cast<double>(b) / bin_count; }
  double upper_edge(int b) const { return static_cast<double>(b + 1) / bin_count; }

  bool operator==(const ReliabilityBins&) const = default;
};

struct MetricsReport {
  double nll_mean = 0.0;
  double ece = 0.0;
  double brier_mean = 0.0;
  double accuracy = 0.0;
  ReliabilityBins bins;

  bool operator==(const MetricsReport&) const = default;
};

// Bin index for a confidence value under the left-open/right-closed rule.
int confidence_bin(double confidence, int bin_count);

double nll(const ProbabilityMatrix& probs, const Labels& labels,
           Reduction reduction = Reduction::kMean);

ReliabilityBins reliability_bins(const ProbabilityMatrix& probs,
                                 const Labels& labels,
                                 int bin_count = kDefaultBinCount);

double ece(const ProbabilityMatrix& probs, const Labels& labels,
           int bin_count = kDefaultBinCount);

// Mean over samples of (1/K) * sum_y (p_y - 1{y == label})^2.
double brier(const ProbabilityMatrix& probs, const Labels& labels);

double accuracy(const ProbabilityMatrix& probs, const Labels& labels);

MetricsReport evaluate(const ProbabilityMatrix& probs, const Labels& labels,
                       int bin_count = kDefaultBinCount);

}  // namespace tempcal

#endif  // TEMPCAL_METRICS_H_
