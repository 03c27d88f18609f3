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

#include "tempcal/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempcal/error.h"

namespace tempcal {
namespace {

void check_inputs(const ProbabilityMatrix& probs, const Labels& labels) {
  if (labels.size() != probs.sample_count()) {
    throw Error(ErrorCode::kShapeMismatch,
                "label count " + std::to_string(labels.size()) +
                    " does not match sample count " + std::to_string(probs.sample_count()));
  }
  if (labels.empty()) throw Error(ErrorCode::kEmptyDataset, "empty dataset");
  const auto k = static_cast<Label>(probs.class_count());
  for (Label y : labels) {
    if (y < 0 || y >= k) throw Error(ErrorCode::kInvalidDataset, "label out of range");
  }
}

}  // namespace

double clamped_neg_log(double p) { return -std::log(std::max(p, kProbabilityFloor)); }

int confidence_bin(double confidence, int bin_count) {
  if (confidence <= 0.0) return 0;
  const double bins = bin_count;
  int b = static_cast<int>(std::ceil(confidence * bins)) - 1;
  b = std::clamp(b, 0, bin_count - 1);
  // ceil(c * B) can land one bin off near an edge; settle against the edges
  // b/B exactly as the bin intervals define them.
  while (b > 0 && confidence <= static_cast<double>(b) / bins) --b;
  while (b < bin_count - 1 && confidence > static_cast<double>(b + 1) / bins) ++b;
  return b;
}

double nll(const ProbabilityMatrix& probs, const Labels& labels, Reduction reduction) {
  check_inputs(probs, labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sum += clamped_neg_log(probs(i, static_cast<std::size_t>(labels[i])));
  }
  return reduction == Reduction::kSum ? sum : sum / static_cast<double>(labels.size());
}

ReliabilityBins reliability_bins(const ProbabilityMatrix& probs, const Labels& labels,
                                 int bin_count) {
  if (bin_count < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  check_inputs(probs, labels);
  ReliabilityBins bins;
  bins.bin_count = bin_count;
  bins.sample_count.assign(bin_count, 0);
  bins.mean_confidence.assign(bin_count, 0.0);
  bins.accuracy.assign(bin_count, 0.0);
  std::vector<std::size_t> correct(bin_count, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = probs.row(i);
    const std::size_t pred = argmax(row);
    const double conf = row[pred];
    const int b = confidence_bin(conf, bin_count);
    bins.sample_count[b] += 1;
    bins.mean_confidence[b] += conf;
    if (pred == static_cast<std::size_t>(labels[i])) correct[b] += 1;
  }
  for (int b = 0; b < bin_count; ++b) {
    if (bins.sample_count[b] == 0) continue;
    const auto n = static_cast<double>(bins.sample_count[b]);
    bins.mean_confidence[b] /= n;
    bins.accuracy[b] = static_cast<double>(correct[b]) / n;
  }
  return bins;
}

namespace {

double ece_from_bins(const ReliabilityBins& bins, std::size_t total) {
  double ece = 0.0;
  for (int b = 0; b < bins.bin_count; ++b) {
    if (bins.sample_count[b] == 0) continue;
    const double weight = static_cast<double>(bins.sample_count[b]) / static_cast<double>(total);
    ece += weight * std::abs(bins.accuracy[b] - bins.mean_confidence[b]);
  }
  return ece;
}

}  // namespace

double ece(const ProbabilityMatrix& probs, const Labels& labels, int bin_count) {
  return ece_from_bins(reliability_bins(probs, labels, bin_count), labels.size());
}

double brier(const ProbabilityMatrix& probs, const Labels& labels) {
  check_inputs(probs, labels);
  const std::size_t k = probs.class_count();
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = probs.row(i);
    double sq = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double target = c == static_cast<std::size_t>(labels[i]) ? 1.0 : 0.0;
      sq += (row[c] - target) * (row[c] - target);
    }
    sum += sq / static_cast<double>(k);
  }
  return sum / static_cast<double>(labels.size());
}

double accuracy(const ProbabilityMatrix& probs, const Labels& labels) {
  check_inputs(probs, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (argmax(probs.row(i)) == static_cast<std::size_t>(labels[i])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

MetricsReport evaluate(const ProbabilityMatrix& probs, const Labels& labels, int bin_count) {
  MetricsReport report;
  report.nll_mean = nll(probs, labels, Reduction::kMean);
  report.bins = reliability_bins(probs, labels, bin_count);
  report.ece = ece_from_bins(report.bins, labels.size());
  report.brier_mean = brier(probs, labels);
  report.accuracy = accuracy(probs, labels);
  return report;
}

}  // namespace tempcal
