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

#include "tempcal/numopt.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "tempcal/error.h"

namespace tempcal {
namespace {

constexpr double kInvGoldenRatio = 0.6180339887498949;
constexpr double kDivergenceThreshold = 1e12;

double probe(const ScalarObjective& objective, double x) {
  const double value = objective(x);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "objective is not finite at " << x;
    throw Error(ErrorCode::kNonFinite, msg.str());
  }
  return value;
}

}  // namespace

void ScalarSearchConfig::validate() const {
  if (!(lower > 0.0 && lower < upper && std::isfinite(upper))) {
    throw Error(ErrorCode::kInvalidArgument, "search bounds must satisfy 0 < lower < upper");
  }
  if (!(tolerance > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tolerance must be positive");
  if (max_iterations < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iterations must be non-negative");
  }
}

ScalarSearchResult minimize_scalar(const ScalarObjective& objective,
                                   const ScalarSearchConfig& cfg) {
  cfg.validate();
  const double f_lower = probe(objective, cfg.lower);
  const double f_upper = probe(objective, cfg.upper);

  double a = std::log(cfg.lower);
  double b = std::log(cfg.upper);
  double c = b - kInvGoldenRatio * (b - a);
  double d = a + kInvGoldenRatio * (b - a);
  double fc = probe(objective, std::exp(c));
  double fd = probe(objective, std::exp(d));

  ScalarSearchResult result;
  while (b - a >= cfg.tolerance && result.iterations < cfg.max_iterations) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvGoldenRatio * (b - a);
      fc = probe(objective, std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvGoldenRatio * (b - a);
      fd = probe(objective, std::exp(d));
    }
    ++result.iterations;
  }
  result.converged = b - a < cfg.tolerance;

  const bool left = fc <= fd;
  result.argmin = std::clamp(std::exp(left ? c : d), cfg.lower, cfg.upper);
  result.value = left ? fc : fd;
  if (f_lower < result.value) {
    result.argmin = cfg.lower;
    result.value = f_lower;
  }
  if (f_upper < result.value) {
    result.argmin = cfg.upper;
    result.value = f_upper;
  }
  return result;
}

std::optional<std::string> check_grid_bracket(const ScalarObjective& objective,
                                              const ScalarSearchConfig& cfg, double argmin,
                                              int grid_points, int slack_cells) {
  cfg.validate();
  const double lo = std::log(cfg.lower);
  const double hi = std::log(cfg.upper);
  const double cell = (hi - lo) / (grid_points - 1);
  int best = 0;
  double best_value = 0.0;
  for (int j = 0; j < grid_points; ++j) {
    const double value = objective(std::exp(lo + cell * j));
    if (j == 0 || value < best_value) {
      best = j;
      best_value = value;
    }
  }
  const double grid_x = lo + cell * best;
  if (std::abs(std::log(argmin) - grid_x) <= slack_cells * cell) return std::nullopt;
  std::ostringstream msg;
  msg << "grid minimum at " << std::exp(grid_x) << " is not bracketed by the search result "
      << argmin << " (objective may not be unimodal)";
  return msg.str();
}

void GradientDescentConfig::validate() const {
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning rate must be positive");
  }
  if (max_iterations < 1) throw Error(ErrorCode::kInvalidArgument, "max_iterations must be >= 1");
  if (!(gradient_tolerance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gradient tolerance must be non-negative");
  }
  if (!(l2_penalty >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "l2 penalty must be >= 0");
}

GradientDescentResult minimize_gd(const DifferentiableObjective& objective,
                                  std::vector<double> init, const GradientDescentConfig& cfg,
                                  const std::function<void(std::span<double>)>& project_gradient) {
  cfg.validate();
  std::vector<double> params = std::move(init);
  std::vector<double> gradient(params.size(), 0.0);

  auto evaluate = [&](int iteration) {
    const double value = objective(params, gradient);
    if (!std::isfinite(value) || value > kDivergenceThreshold) {
      std::ostringstream msg;
      msg << "gradient descent diverged at iteration " << iteration << " (objective " << value
          << ")";
      throw Error(ErrorCode::kDivergence, msg.str());
    }
    if (project_gradient) project_gradient(gradient);
    return value;
  };

  GradientDescentResult result;
  double value = evaluate(0);
  result.params = params;
  result.value = value;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    double norm_sq = 0.0;
    for (double g : gradient) norm_sq += g * g;
    if (std::sqrt(norm_sq) < cfg.gradient_tolerance) {
      result.converged = true;
      break;
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.learning_rate * gradient[i];
    value = evaluate(it + 1);
    result.iterations = it + 1;
    if (value < result.value) {
      result.value = value;
      result.params = params;
    }
  }
  return result;
}

GradientCheck check_gradient(const DifferentiableObjective& objective,
                             std::span<const double> params, double step) {
  std::vector<double> point(params.begin(), params.end());
  std::vector<double> analytic(point.size());
  std::vector<double> scratch(point.size());
  objective(point, analytic);

  GradientCheck check;
  for (std::size_t i = 0; i < point.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + step;
    const double plus = objective(point, scratch);
    point[i] = saved - step;
    const double minus = objective(point, scratch);
    point[i] = saved;
    const double numeric = (plus - minus) / (2.0 * step);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-6});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    if (rel > check.max_relative_error) {
      check.max_relative_error = rel;
      check.worst_index = i;
    }
  }
  return check;
}

}  // namespace tempcal
