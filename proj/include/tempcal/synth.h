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

#ifndef TEMPCAL_SYNTH_H_
#define TEMPCAL_SYNTH_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/uts.h"

namespace tempcal {

// Generator parameters. True logits are f ~ N(mu, sigma^2 I) with class
// offsets mu chosen so that labels drawn from softmax(f) follow `priors`;
// the "model" reports w * f.
struct SyntheticSpec {
  std::size_t class_count = 10;
  std::size_t sample_count = 10000;
  double logit_scale = 2.0;
  std::optional<std::vector<double>> priors;  // uniform when absent
  double miscalibration_w = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const SyntheticSpec&) const = default;
};

struct SyntheticDataset {
  LogitDataset observed;  // logits = w * true_logits, labels drawn
  Matrix true_logits;
  ProbabilityMatrix true_posterior;
  Labels labels;
  std::vector<double> offsets;
  std::vector<double> empirical_priors;
  double w = 1.0;
};

// Offsets solving mean softmax(mu + sigma z)_k ~= prior_k on a pilot draw.
std::vector<double> solve_prior_offsets(const SyntheticSpec& spec);

SyntheticDataset generate(const SyntheticSpec& spec);

// Covariate-shifted draw: sigma_t = sigma / (1 + severity), with class offsets
// re-solved at sigma_t so that q_t(y) = q_s(y). Labels still come from
// softmax(f), and the observed logits are target_w * f. With severity 0,
// target_w == spec.miscalibration_w and seed == spec.seed this reproduces
// generate(spec) exactly.
SyntheticDataset shift_domain(const SyntheticSpec& spec, double severity,
                              double target_w, std::uint64_t seed);

// Each label is replaced with probability `rate` by a uniform draw over the
// other K-1 classes.
LogitDataset flip_labels(const LogitDataset& ds, double rate, std::uint64_t seed);

}  // namespace tempcal

#endif  // TEMPCAL_SYNTH_H_
