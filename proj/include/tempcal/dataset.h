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

#ifndef TEMPCAL_DATASET_H_
#define TEMPCAL_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempcal/matrix.h"

namespace tempcal {

using Label = int;
using Labels = std::vector<Label>;

// Per-sample logits with optional 0-based class labels. A dataset is either
// fully labeled or fully unlabeled. Immutable once constructed; the
// constructor enforces every invariant (K >= 2, finite logits, labels in
// [0, K), one label per row).
class LogitDataset {
 public:
  explicit LogitDataset(Matrix logits, std::optional<Labels> labels = std::nullopt);

  const Matrix& logits() const { return logits_; }
  const std::optional<Labels>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }
  std::size_t class_count() const { return logits_.cols(); }
  std::size_t sample_count() const { return logits_.rows(); }

  // Throws Error(kMissingLabels) when unlabeled.
  const Labels& require_labels() const;

  bool operator==(const LogitDataset&) const = default;

 private:
  Matrix logits_;
  std::optional<Labels> labels_;
};

// Row-stochastic class probabilities. Rows sum to 1 within 1e-9 and every
// entry lies in [0, 1]; the constructor checks both.
class ProbabilityMatrix {
 public:
  explicit ProbabilityMatrix(Matrix probs);

  const Matrix& values() const { return probs_; }
  std::size_t class_count() const { return probs_.cols(); }
  std::size_t sample_count() const { return probs_.rows(); }
  double operator()(std::size_t r, std::size_t c) const { return probs_(r, c); }
  std::span<const double> row(std::size_t r) const { return probs_.row(r); }

  bool operator==(const ProbabilityMatrix&) const = default;

 private:
  Matrix probs_;
};

struct TemperatureFit {
  double temperature = 1.0;
  std::optional<double> w_star;
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;
  // Non-fatal diagnostics, e.g. the grid-bracket unimodality check.
  std::vector<std::string> warnings;

  bool operator==(const TemperatureFit&) const = default;
};

struct Partition {
  std::vector<std::size_t> calibration_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

// Builds a dataset from possibly ragged rows, reporting the first violated
// invariant: ragged row, non-finite logit at (row,col), label out of range.
LogitDataset validate_dataset(const std::vector<std::vector<double>>& rows,
                              std::optional<Labels> labels,
                              std::size_t class_count);

// Re-checks an existing dataset and returns it unchanged.
const LogitDataset& validate_dataset(const LogitDataset& ds);

// Random calibration/test partition. |calibration| = round(fraction * L);
// both sides must end up non-empty. Index sets are returned sorted.
Partition split(const LogitDataset& ds, double calibration_fraction,
                std::uint64_t seed);

LogitDataset drop_labels(const LogitDataset& ds);

// Rows (and labels, if any) at the given indices, in index order.
LogitDataset subset(const LogitDataset& ds, const std::vector<std::size_t>& indices);

LogitDataset with_labels(const LogitDataset& ds, Labels labels);

}  // namespace tempcal

#endif  // TEMPCAL_DATASET_H_
