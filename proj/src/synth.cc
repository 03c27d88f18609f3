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

#include "tempcal/synth.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempcal/error.h"
#include "tempcal/random.h"
#include "tempcal/softmax.h"

namespace tempcal {
namespace {

constexpr std::size_t kPilotSamples = 4000;
constexpr int kOffsetIterations = 500;

bool is_uniform(const std::vector<double>& priors) {
  return std::all_of(priors.begin(), priors.end(),
                     [&](double p) { return p == priors.front(); });
}

void center(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

SyntheticDataset draw(std::size_t class_count, std::size_t sample_count, double sigma,
                      const std::vector<double>& offsets, double w, std::uint64_t seed) {
  Rng logit_rng(seed, Stream::kLogits);
  Rng label_rng(seed, Stream::kLabels);
  Matrix f(sample_count, class_count);
  Matrix posterior(sample_count, class_count);
  Labels labels(sample_count);
  std::vector<double> counts(class_count, 0.0);
  for (std::size_t i = 0; i < sample_count; ++i) {
    auto row = f.row(i);
    for (std::size_t k = 0; k < class_count; ++k) row[k] = offsets[k] + sigma * logit_rng.normal();
    softmax_row(row, 1.0, posterior.row(i));
    const std::size_t y = label_rng.categorical(posterior.row(i));
    labels[i] = static_cast<Label>(y);
    counts[y] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(sample_count);
  Matrix observed = f;
  for (double& v : observed.data()) v *= w;
  return SyntheticDataset{LogitDataset(std::move(observed), labels),
                          std::move(f),
                          ProbabilityMatrix(std::move(posterior)),
                          labels,
                          offsets,
                          std::move(counts),
                          w};
}

}  // namespace

void SyntheticSpec::validate() const {
  if (class_count < 2) throw Error(ErrorCode::kInvalidArgument, "class_count must be >= 2");
  if (sample_count < 1) throw Error(ErrorCode::kInvalidArgument, "sample_count must be >= 1");
  if (!(logit_scale > 0.0) || !std::isfinite(logit_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "logit_scale must be positive");
  }
  if (!(miscalibration_w > 0.0) || !std::isfinite(miscalibration_w)) {
    throw Error(ErrorCode::kInvalidArgument, "miscalibration_w must be positive");
  }
  if (priors) {
    if (priors->size() != class_count) {
      throw Error(ErrorCode::kShapeMismatch, "priors length does not match class_count");
    }
    ClassPriors check(*priors);
  }
}

std::vector<double> solve_prior_offsets(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t k_count = spec.class_count;
  std::vector<double> offsets(k_count, 0.0);
  if (!spec.priors || is_uniform(*spec.priors)) return offsets;

  std::vector<double> target(k_count);
  for (std::size_t k = 0; k < k_count; ++k) target[k] = std::max((*spec.priors)[k], 1e-6);
  Rng rng(spec.seed, Stream::kPriorPilot);
  Matrix pilot(kPilotSamples, k_count);
  for (double& z : pilot.data()) z = spec.logit_scale * rng.normal();

  for (std::size_t k = 0; k < k_count; ++k) offsets[k] = std::log(target[k]);
  center(offsets);
  std::vector<double> row(k_count);
  std::vector<double> probs(k_count);
  for (int it = 0; it < kOffsetIterations; ++it) {
    std::vector<double> mean(k_count, 0.0);
    for (std::size_t i = 0; i < kPilotSamples; ++i) {
      for (std::size_t k = 0; k < k_count; ++k) row[k] = offsets[k] + pilot(i, k);
      softmax_row(row, 1.0, probs);
      for (std::size_t k = 0; k < k_count; ++k) mean[k] += probs[k];
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) {
      const double step = std::log(target[k] / (mean[k] / kPilotSamples));
      worst = std::max(worst, std::abs(step));
      offsets[k] += step;
    }
    center(offsets);
    if (worst < 1e-10) break;
  }
  return offsets;
}

SyntheticDataset generate(const SyntheticSpec& spec) {
  spec.validate();
  return draw(spec.class_count, spec.sample_count, spec.logit_scale, solve_prior_offsets(spec),
              spec.miscalibration_w, spec.seed);
}

SyntheticDataset shift_domain(const SyntheticSpec& spec, double severity, double target_w,
                              std::uint64_t seed) {
  spec.validate();
  if (!(severity >= 0.0) || !std::isfinite(severity)) {
    throw Error(ErrorCode::kInvalidArgument, "shift severity must be >= 0");
  }
  if (!(target_w > 0.0) || !std::isfinite(target_w)) {
    throw Error(ErrorCode::kInvalidArgument, "target_w must be positive");
  }
  // Offsets are re-solved at the narrower spread so the label marginal is the
  // same as in the source domain.
  SyntheticSpec target = spec;
  target.logit_scale = spec.logit_scale / (1.0 + severity);
  const double sigma = target.logit_scale;
  const std::vector<double> offsets = solve_prior_offsets(target);
  return draw(spec.class_count, spec.sample_count, sigma, offsets, target_w, seed);
}

LogitDataset flip_labels(const LogitDataset& ds, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "flip rate must lie in [0,1]");
  }
  Labels labels = ds.require_labels();
  const std::size_t k = ds.class_count();
  // Both draws happen for every sample, so the flipped set grows
  // monotonically with the rate under a fixed seed.
  Rng rng(seed, Stream::kLabelFlip);
  for (Label& y : labels) {
    const double u = rng.uniform();
    const std::size_t offset = 1 + rng.uniform_index(k - 1);
    if (u < rate) y = static_cast<Label>((static_cast<std::size_t>(y) + offset) % k);
  }
  return with_labels(ds, std::move(labels));
}

}  // namespace tempcal
