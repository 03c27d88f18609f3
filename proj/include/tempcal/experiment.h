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

#ifndef TEMPCAL_EXPERIMENT_H_
#define TEMPCAL_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempcal/metrics.h"
#include "tempcal/numopt.h"
#include "tempcal/synth.h"

namespace tempcal {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class Method { kTs, kUts, kVector, kMatrix, kAts };
enum class SweepKind { kNoise, kShift, kCalibSize };
enum class PriorsKind { kUniform, kExplicit, kEmpiricalFile };
enum class CalibrationDomain { kSource, kTarget };

std::string to_string(Method method);
Method parse_method(const std::string& text);
std::string to_string(SweepKind kind);
SweepKind parse_sweep_kind(const std::string& text);

struct PriorsSource {
  PriorsKind kind = PriorsKind::kUniform;
  std::vector<double> values;  // kExplicit
  std::string path;            // kEmpiricalFile

  bool operator==(const PriorsSource&) const = default;
};

struct Sweep {
  SweepKind kind = SweepKind::kNoise;
  std::vector<double> values;

  bool operator==(const Sweep&) const = default;
};

// Exactly one data source is used, checked in this order:
//   synthetic        - generated pool, split per repetition;
//   data_path        - one labeled CSV, split per repetition;
//   calibration_path + test_path - fixed calibration and test files.
// Shift sweeps require `synthetic` (it is the source domain) and `target_w`.
struct ExperimentConfig {
  Method method = Method::kTs;
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::string> data_path;
  std::optional<std::string> calibration_path;
  std::optional<std::string> test_path;
  double target_w = 1.0;
  // Shift sweeps only. Defaults to target for UTS and source otherwise.
  std::optional<CalibrationDomain> calibration_domain;
  PriorsSource priors;
  std::optional<Sweep> sweep;
  std::uint64_t seed = 0;
  int repetitions = 20;
  double calibration_fraction = 0.2;
  ScalarSearchConfig scalar;
  GradientDescentConfig gradient_descent;
  int bin_count = kDefaultBinCount;

  void validate() const;
  CalibrationDomain effective_calibration_domain() const;
  bool operator==(const ExperimentConfig&) const = default;
};

struct FitSummary {
  std::optional<double> temperature;  // temperature-family methods
  std::optional<double> w_star;       // UTS only
  double final_loss = 0.0;
  int iterations = 0;
  bool converged = false;

  bool operator==(const FitSummary&) const = default;
};

struct RepetitionRecord {
  int index = 0;
  std::uint64_t seed = 0;
  FitSummary fit;
  MetricsReport calibrated;
  MetricsReport uncalibrated;

  bool operator==(const RepetitionRecord&) const = default;
};

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single value

  bool operator==(const Stat&) const = default;
};

struct MetricsSummary {
  Stat nll;
  Stat ece;
  Stat brier;
  Stat accuracy;

  bool operator==(const MetricsSummary&) const = default;
};

struct ConditionRecord {
  std::optional<double> condition;  // sweep value, absent without a sweep
  std::vector<RepetitionRecord> repetitions;
  std::optional<Stat> temperature;
  std::optional<Stat> w_star;
  MetricsSummary calibrated;
  MetricsSummary uncalibrated;

  bool operator==(const ConditionRecord&) const = default;
};

struct Report {
  ExperimentConfig config;
  std::string toolkit_version = kToolkitVersion;
  std::vector<ConditionRecord> records;
  std::optional<double> wall_time_seconds;

  bool operator==(const Report&) const = default;
};

Stat summarize(const std::vector<double>& values);

// Runs every sweep condition for every repetition. Repetitions run on up to
// `threads` worker threads (0: TEMPCAL_THREADS or 1); the report does not
// depend on the thread count.
Report run_experiment(const ExperimentConfig& cfg, int threads = 0);

// Thread count from the TEMPCAL_THREADS environment variable, default 1.
int default_thread_count();

// JSON with sorted keys. Wall time is written only when include_timing is
// set. Throws Error(kNonFinite) if any number is NaN or infinite.
std::string report_to_json(const Report& report, bool include_timing = false);
Report report_from_json(const std::string& text);
void save_report(const Report& report, const std::string& path,
                 bool include_timing = false);
Report load_report(const std::string& path);

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

}  // namespace tempcal

#endif  // TEMPCAL_EXPERIMENT_H_
