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

#ifndef TEMPCAL_NUMOPT_H_
#define TEMPCAL_NUMOPT_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace tempcal {

// Bounded search for a positive scalar (T or w). The search runs over
// log(x) in [log(lower), log(upper)]; tolerance is on the log-space bracket.
struct ScalarSearchConfig {
  double lower = 1e-3;
  double upper = 1e3;
  double tolerance = 1e-6;
  int max_iterations = 200;

  void validate() const;
  bool operator==(const ScalarSearchConfig&) const = default;
};

struct ScalarSearchResult {
  double argmin = 1.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ScalarObjective = std::function<double(double)>;

// Golden-section search in log space. Both bounds are probed first, and the
// returned point is never worse than either bound. Throws Error(kNonFinite)
// if any probe is NaN or infinite.
ScalarSearchResult minimize_scalar(const ScalarObjective& objective,
                                   const ScalarSearchConfig& cfg);

// Scans a log-spaced grid over the search range and returns a warning if the
// grid minimum lies more than `slack_cells` cells away from `argmin`.
std::optional<std::string> check_grid_bracket(const ScalarObjective& objective,
                                              const ScalarSearchConfig& cfg,
                                              double argmin, int grid_points = 50,
                                              int slack_cells = 2);

struct GradientDescentConfig {
  double learning_rate = 0.01;
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;
  double l2_penalty = 0.0;

  void validate() const;
  bool operator==(const GradientDescentConfig&) const = default;
};

// Returns the objective at `params` and writes the gradient into `gradient`.
using DifferentiableObjective =
    std::function<double(std::span<const double> params, std::span<double> gradient)>;

struct GradientDescentResult {
  std::vector<double> params;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Fixed-step full-batch descent, stopping when the gradient norm drops below
// the tolerance. Returns the lowest-objective iterate visited. Throws
// Error(kDivergence) once the objective exceeds 1e12 or turns non-finite.
GradientDescentResult minimize_gd(const DifferentiableObjective& objective,
                                  std::vector<double> init,
                                  const GradientDescentConfig& cfg,
                                  const std::function<void(std::span<double>)>&
                                      project_gradient = {});

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

// Compares the analytic gradient against central differences with the given
// step. Relative error per coordinate is |a - n| / max(|a|, |n|, 1e-6).
GradientCheck check_gradient(const DifferentiableObjective& objective,
                             std::span<const double> params, double step = 1e-5);

}  // namespace tempcal

#endif  // TEMPCAL_NUMOPT_H_
