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

#ifndef TEMPCAL_ATS_H_
#define TEMPCAL_ATS_H_

#include <cstddef>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/numopt.h"

namespace tempcal {

enum class AssignmentRule { kDefault, kExternal };

// Per-class member sets M_k. A sample may belong to several classes.
struct AttendedAssignment {
  std::vector<std::vector<std::size_t>> members;
  AssignmentRule rule = AssignmentRule::kDefault;

  bool empty() const;
  bool operator==(const AttendedAssignment&) const = default;
};

// Default rule: i is in M_k iff y_i == k, or the model predicts k and y_i != k.
// This stands in for the attention-based selection of the original method.
AttendedAssignment build_assignment(const LogitDataset& ds);

// Validates externally supplied member sets (one per class, indices < L).
AttendedAssignment build_assignment(const LogitDataset& ds,
                                    std::vector<std::vector<std::size_t>> members);

// Negative log of S_k * (1 - S_{y_i}) / (1 - S_k) for one member. Complements
// are computed as sums over the other classes and floored at 1e-12.
double ats_term(std::span<const double> probs, std::size_t k, std::size_t label);

// L_ATS summed over every (k, i in M_k) with the tempered softmax at T.
double l_ats(const LogitDataset& ds, const AttendedAssignment& assignment,
             double temperature);

TemperatureFit fit_ats(const LogitDataset& calib, const AttendedAssignment& assignment,
                       const ScalarSearchConfig& cfg = {});

inline TemperatureFit fit_ats(const LogitDataset& calib,
                              const ScalarSearchConfig& cfg = {}) {
  return fit_ats(calib, build_assignment(calib), cfg);
}

}  // namespace tempcal

#endif  // TEMPCAL_ATS_H_
