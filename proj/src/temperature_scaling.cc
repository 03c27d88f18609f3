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

#include "tempcal/temperature_scaling.h"

#include <cmath>
#include <vector>

#include "tempcal/error.h"
#include "tempcal/metrics.h"
#include "tempcal/softmax.h"

namespace tempcal {

double temperature_nll_sum(const Matrix& logits, const Labels& labels, double temperature) {
  std::vector<double> probs(logits.cols());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    softmax_row(logits.row(i), temperature, probs);
    sum += clamped_neg_log(probs[static_cast<std::size_t>(labels[i])]);
  }
  return sum;
}

TemperatureFit fit_temperature(const LogitDataset& calib, const ScalarSearchConfig& cfg) {
  const Labels& labels = calib.require_labels();
  if (calib.sample_count() == 0) throw Error(ErrorCode::kEmptyDataset, "empty calibration set");
  if (calib.sample_count() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "temperature scaling needs at least 2 samples");
  }
  const auto objective = [&](double t) {
    return temperature_nll_sum(calib.logits(), labels, t);
  };
  const ScalarSearchResult search = minimize_scalar(objective, cfg);

  TemperatureFit fit;
  fit.temperature = search.argmin;
  fit.final_loss = search.value;
  fit.iterations = search.iterations;
  fit.converged = search.converged;
  if (auto warning = check_grid_bracket(objective, cfg, search.argmin)) {
    fit.warnings.push_back(*warning);
  }
  return fit;
}

double stationarity_residual(const LogitDataset& calib, double temperature) {
  const Labels& labels = calib.require_labels();
  if (calib.sample_count() == 0) throw Error(ErrorCode::kEmptyDataset, "empty calibration set");
  const Matrix& logits = calib.logits();
  std::vector<double> probs(logits.cols());
  double observed = 0.0;
  double expected = 0.0;
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto f = logits.row(i);
    softmax_row(f, temperature, probs);
    observed += f[static_cast<std::size_t>(labels[i])];
    for (std::size_t k = 0; k < f.size(); ++k) expected += f[k] * probs[k];
  }
  return std::abs(observed - expected) / static_cast<double>(logits.rows());
}

ProbabilityMatrix apply_temperature(const LogitDataset& ds, const TemperatureFit& fit) {
  return tempered_softmax(ds.logits(), fit.temperature);
}

}  // namespace tempcal
