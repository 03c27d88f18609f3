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

#include "tempcal/dataset.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempcal/error.h"
#include "tempcal/random.h"

namespace tempcal {
namespace {

void check_dataset(const Matrix& logits, const std::optional<Labels>& labels) {
  if (logits.cols() < 2) {
    throw Error(ErrorCode::kInvalidDataset,
                "class count must be at least 2, got " + std::to_string(logits.cols()));
  }
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      if (!std::isfinite(logits(r, c))) {
        throw Error(ErrorCode::kNonFinite, "non-finite logit at (" + std::to_string(r) +
                                               "," + std::to_string(c) + ")");
      }
    }
  }
  if (!labels) return;
  if (labels->size() != logits.rows()) {
    throw Error(ErrorCode::kShapeMismatch,
                "label count " + std::to_string(labels->size()) +
                    " does not match sample count " + std::to_string(logits.rows()));
  }
  const auto k = static_cast<Label>(logits.cols());
  for (std::size_t i = 0; i < labels->size(); ++i) {
    const Label y = (*labels)[i];
    if (y < 0 || y >= k) {
      throw Error(ErrorCode::kInvalidDataset,
                  "label out of range at row " + std::to_string(i) + ": " +
                      std::to_string(y) + " not in [0," + std::to_string(k) + ")");
    }
  }
}

}  // namespace

LogitDataset::LogitDataset(Matrix logits, std::optional<Labels> labels)
    : logits_(std::move(logits)), labels_(std::move(labels)) {
  check_dataset(logits_, labels_);
}

const Labels& LogitDataset::require_labels() const {
  if (!labels_) throw Error(ErrorCode::kMissingLabels, "labels required");
  return *labels_;
}

ProbabilityMatrix::ProbabilityMatrix(Matrix probs) : probs_(std::move(probs)) {
  for (std::size_t r = 0; r < probs_.rows(); ++r) {
    double total = 0.0;
    for (double p : probs_.row(r)) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "probability outside [0,1] in row " + std::to_string(r));
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "probability row " + std::to_string(r) + " does not sum to 1");
    }
  }
}

LogitDataset validate_dataset(const std::vector<std::vector<double>>& rows,
                              std::optional<Labels> labels, std::size_t class_count) {
  return LogitDataset(Matrix::from_rows(rows, class_count), std::move(labels));
}

const LogitDataset& validate_dataset(const LogitDataset& ds) {
  check_dataset(ds.logits(), ds.labels());
  return ds;
}

Partition split(const LogitDataset& ds, double calibration_fraction, std::uint64_t seed) {
  const std::size_t n = ds.sample_count();
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration fraction must lie in (0,1)");
  }
  const auto n_cal =
      static_cast<std::size_t>(std::llround(calibration_fraction * static_cast<double>(n)));
  if (n < 2 || n_cal < 1 || n_cal >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset of " + std::to_string(n) +
                    " samples is too small for calibration fraction " +
                    std::to_string(calibration_fraction));
  }
  Rng rng(seed, Stream::kPartition);
  const auto order = permutation(n, rng);
  Partition p;
  p.seed = seed;
  p.calibration_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_cal));
  p.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_cal), order.end());
  std::sort(p.calibration_indices.begin(), p.calibration_indices.end());
  std::sort(p.test_indices.begin(), p.test_indices.end());
  return p;
}

LogitDataset drop_labels(const LogitDataset& ds) { return LogitDataset(ds.logits()); }

LogitDataset subset(const LogitDataset& ds, const std::vector<std::size_t>& indices) {
  const std::size_t k = ds.class_count();
  Matrix m(indices.size(), k);
  std::optional<Labels> labels;
  if (ds.has_labels()) labels.emplace();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t src = indices[r];
    if (src >= ds.sample_count()) {
      throw Error(ErrorCode::kInvalidArgument, "subset index out of range: " + std::to_string(src));
    }
    std::copy_n(ds.logits().row(src).begin(), k, m.row(r).begin());
    if (labels) labels->push_back((*ds.labels())[src]);
  }
  return LogitDataset(std::move(m), std::move(labels));
}

LogitDataset with_labels(const LogitDataset& ds, Labels labels) {
  return LogitDataset(ds.logits(), std::move(labels));
}

}  // namespace tempcal
