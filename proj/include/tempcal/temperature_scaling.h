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

#ifndef TEMPCAL_TEMPERATURE_SCALING_H_
#define TEMPCAL_TEMPERATURE_SCALING_H_

#include "tempcal/dataset.h"
#include "tempcal/numopt.h"

namespace tempcal {

// Sum of clamped negative log-likelihoods of the tempered softmax. Equals
// nll(tempered_softmax(logits, T), labels, kSum) bit for bit.
double temperature_nll_sum(const Matrix& logits, const Labels& labels,
                           double temperature);

// Fits T > 0 minimizing the summed NLL on a labeled calibration set
// (at least two samples). final_loss is the summed NLL at the returned T.
TemperatureFit fit_temperature(const LogitDataset& calib,
                               const ScalarSearchConfig& cfg = {});

// |sum_i f_{y_i} - sum_i sum_k f_k S_k(x_i; T)| / L. Zero at a stationary
// point of the NLL in T.
double stationarity_residual(const LogitDataset& calib, double temperature);

ProbabilityMatrix apply_temperature(const LogitDataset& ds, const TemperatureFit& fit);

}  // namespace tempcal

#endif  // TEMPCAL_TEMPERATURE_SCALING_H_
