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

#include "tempcal/experiment.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "tempcal/affine.h"
#include "tempcal/ats.h"
#include "tempcal/error.h"
#include "tempcal/io.h"
#include "tempcal/random.h"
#include "tempcal/softmax.h"
#include "tempcal/temperature_scaling.h"
#include "tempcal/uts.h"

namespace tempcal {

using json = nlohmann::json;

std::string to_string(Method method) {
  switch (method) {
    case Method::kTs: return "ts";
    case Method::kUts: return "uts";
    case Method::kVector: return "vector";
    case Method::kMatrix: return "matrix";
    case Method::kAts: return "ats";
  }
  return "ts";
}

Method parse_method(const std::string& text) {
  if (text == "ts") return Method::kTs;
  if (text == "uts") return Method::kUts;
  if (text == "vector") return Method::kVector;
  if (text == "matrix") return Method::kMatrix;
  if (text == "ats") return Method::kAts;
  throw Error(ErrorCode::kInvalidArgument, "unknown method '" + text + "'");
}

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::kNoise: return "noise-rates";
    case SweepKind::kShift: return "shift-severities";
    case SweepKind::kCalibSize: return "calib-sizes";
  }
  return "noise-rates";
}

SweepKind parse_sweep_kind(const std::string& text) {
  if (text == "noise-rates" || text == "noise") return SweepKind::kNoise;
  if (text == "shift-severities" || text == "shift") return SweepKind::kShift;
  if (text == "calib-sizes" || text == "size") return SweepKind::kCalibSize;
  throw Error(ErrorCode::kInvalidArgument, "unknown sweep kind '" + text + "'");
}

namespace {

std::string to_string(PriorsKind kind) {
  switch (kind) {
    case PriorsKind::kUniform: return "uniform";
    case PriorsKind::kExplicit: return "explicit";
    case PriorsKind::kEmpiricalFile: return "empirical";
  }
  return "uniform";
}

PriorsKind parse_priors_kind(const std::string& text) {
  if (text == "uniform") return PriorsKind::kUniform;
  if (text == "explicit") return PriorsKind::kExplicit;
  if (text == "empirical") return PriorsKind::kEmpiricalFile;
  throw Error(ErrorCode::kParse, "unknown priors kind '" + text + "'");
}

bool is_temperature_method(Method m) {
  return m == Method::kTs || m == Method::kUts || m == Method::kAts;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (repetitions < 1) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  if (bin_count < 1) throw Error(ErrorCode::kInvalidArgument, "bin count must be >= 1");
  if (!(calibration_fraction > 0.0 && calibration_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "calibration fraction must lie in (0,1)");
  }
  scalar.validate();
  gradient_descent.validate();
  if (synthetic) synthetic->validate();
  const bool fixed = calibration_path.has_value() || test_path.has_value();
  if (!synthetic && !data_path && !(calibration_path && test_path)) {
    throw Error(ErrorCode::kInvalidArgument,
                "no data source: give a synthetic spec, a data file, or calibration and test files");
  }
  if (fixed && !(calibration_path && test_path) && !synthetic && !data_path) {
    throw Error(ErrorCode::kInvalidArgument, "calibration and test files must be given together");
  }
  if (priors.kind == PriorsKind::kExplicit) ClassPriors check(priors.values);
  if (priors.kind == PriorsKind::kEmpiricalFile && priors.path.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empirical priors need a file path");
  }
  if (!sweep) return;
  if (sweep->values.empty()) throw Error(ErrorCode::kInvalidArgument, "sweep values are empty");
  for (double v : sweep->values) {
    switch (sweep->kind) {
      case SweepKind::kNoise:
        if (!(v >= 0.0 && v <= 1.0)) {
          throw Error(ErrorCode::kInvalidArgument, "noise rates must lie in [0,1]");
        }
        break;
      case SweepKind::kShift:
        if (!(v >= 0.0) || !std::isfinite(v)) {
          throw Error(ErrorCode::kInvalidArgument, "shift severities must be >= 0");
        }
        break;
      case SweepKind::kCalibSize:
        if (!(v >= 1.0) || v != std::floor(v)) {
          throw Error(ErrorCode::kInvalidArgument, "calibration sizes must be positive integers");
        }
        if (synthetic && v < static_cast<double>(synthetic->class_count)) {
          throw Error(ErrorCode::kInvalidArgument, "calibration sizes must be >= class count");
        }
        break;
    }
  }
  if (sweep->kind == SweepKind::kShift) {
    if (!synthetic) {
      throw Error(ErrorCode::kInvalidArgument, "shift sweeps need a synthetic source spec");
    }
    if (!(target_w > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target_w must be positive");
  }
}

CalibrationDomain ExperimentConfig::effective_calibration_domain() const {
  if (calibration_domain) return *calibration_domain;
  return method == Method::kUts ? CalibrationDomain::kTarget : CalibrationDomain::kSource;
}

Stat summarize(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  }
  return s;
}

int default_thread_count() {
  if (const char* env = std::getenv("TEMPCAL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

namespace {

struct DataSources {
  std::optional<LogitDataset> pool;
  std::optional<LogitDataset> fixed_calibration;
  std::optional<LogitDataset> fixed_test;
  std::vector<LogitDataset> targets;  // one per shift severity
  std::optional<ClassPriors> priors;
};

std::size_t class_count_of(const DataSources& data) {
  if (data.pool) return data.pool->class_count();
  return data.fixed_calibration->class_count();
}

DataSources load_sources(const ExperimentConfig& cfg) {
  DataSources data;
  if (cfg.synthetic) {
    data.pool = generate(*cfg.synthetic).observed;
    if (cfg.sweep && cfg.sweep->kind == SweepKind::kShift) {
      const std::uint64_t target_seed = derive_seed(cfg.synthetic->seed, Stream::kTargetDomain);
      for (double severity : cfg.sweep->values) {
        data.targets.push_back(
            shift_domain(*cfg.synthetic, severity, cfg.target_w, target_seed).observed);
      }
    }
  } else if (cfg.data_path) {
    data.pool = load_dataset(*cfg.data_path);
  } else {
    data.fixed_calibration = load_dataset(*cfg.calibration_path);
    data.fixed_test = load_dataset(*cfg.test_path);
    if (data.fixed_calibration->class_count() != data.fixed_test->class_count()) {
      throw Error(ErrorCode::kShapeMismatch, "calibration and test files disagree on class count");
    }
  }
  if (cfg.method == Method::kUts) {
    const std::size_t k = class_count_of(data);
    switch (cfg.priors.kind) {
      case PriorsKind::kUniform: data.priors = ClassPriors::uniform(k); break;
      case PriorsKind::kExplicit: data.priors = ClassPriors(cfg.priors.values); break;
      case PriorsKind::kEmpiricalFile:
        data.priors = empirical_priors(load_dataset(cfg.priors.path));
        break;
    }
    if (data.priors->size() != k) {
      throw Error(ErrorCode::kShapeMismatch, "priors do not match the class count");
    }
  }
  return data;
}

struct CalibrationTask {
  LogitDataset calibration;
  LogitDataset test;
};

CalibrationTask draw_sets(const ExperimentConfig& cfg, const DataSources& data,
                          std::size_t condition, std::uint64_t rep_seed) {
  if (!data.targets.empty()) {
    const LogitDataset& source = *data.pool;
    const LogitDataset& target = data.targets[condition];
    const Partition source_split = split(source, cfg.calibration_fraction, rep_seed);
    const Partition target_split = split(target, cfg.calibration_fraction, rep_seed);
    LogitDataset calibration =
        cfg.effective_calibration_domain() == CalibrationDomain::kSource
            ? subset(source, source_split.calibration_indices)
            : subset(target, target_split.calibration_indices);
    return {std::move(calibration), subset(target, target_split.test_indices)};
  }
  if (data.pool) {
    const Partition part = split(*data.pool, cfg.calibration_fraction, rep_seed);
    return {subset(*data.pool, part.calibration_indices), subset(*data.pool, part.test_indices)};
  }
  return {*data.fixed_calibration, *data.fixed_test};
}

LogitDataset apply_condition(const ExperimentConfig& cfg, LogitDataset calibration, double value,
                             std::uint64_t rep_seed) {
  if (!cfg.sweep) return calibration;
  switch (cfg.sweep->kind) {
    case SweepKind::kNoise:
      if (!calibration.has_labels()) return calibration;
      return flip_labels(calibration, value, rep_seed);
    case SweepKind::kCalibSize: {
      const auto n = static_cast<std::size_t>(value);
      if (n > calibration.sample_count()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "calibration size " + std::to_string(n) + " exceeds the " +
                        std::to_string(calibration.sample_count()) + " available samples");
      }
      Rng rng(rep_seed, Stream::kSubsample);
      auto order = permutation(calibration.sample_count(), rng);
      order.resize(n);
      std::sort(order.begin(), order.end());
      return subset(calibration, order);
    }
    case SweepKind::kShift: return calibration;
  }
  return calibration;
}

RepetitionRecord run_repetition(const ExperimentConfig& cfg, const DataSources& data,
                                std::size_t condition, double value, int rep) {
  const std::uint64_t rep_seed =
      derive_seed(derive_seed(cfg.seed, Stream::kRepetition), static_cast<std::uint64_t>(rep));
  CalibrationTask sets = draw_sets(cfg, data, condition, rep_seed);
  const LogitDataset calibration = apply_condition(cfg, std::move(sets.calibration), value, rep_seed);
  const Labels& test_labels = sets.test.require_labels();

  RepetitionRecord record;
  record.index = rep;
  record.seed = rep_seed;
  std::optional<ProbabilityMatrix> probs;
  if (is_temperature_method(cfg.method)) {
    TemperatureFit fit;
    switch (cfg.method) {
      case Method::kTs: fit = fit_temperature(calibration, cfg.scalar); break;
      case Method::kUts: fit = fit_uts(calibration.logits(), *data.priors, cfg.scalar); break;
      default: fit = fit_ats(calibration, cfg.scalar); break;
    }
    record.fit = {fit.temperature, fit.w_star, fit.final_loss, fit.iterations, fit.converged};
    probs = apply_temperature(sets.test, fit);
  } else {
    const AffineMode mode = cfg.method == Method::kMatrix ? AffineMode::kMatrix : AffineMode::kVector;
    const AffineFit fit = fit_affine(calibration, mode, cfg.gradient_descent);
    record.fit = {std::nullopt, std::nullopt, fit.final_loss, fit.iterations, fit.converged};
    probs = apply_affine(sets.test, fit);
  }
  record.calibrated = evaluate(*probs, test_labels, cfg.bin_count);
  record.uncalibrated = evaluate(tempered_softmax(sets.test.logits(), 1.0), test_labels, cfg.bin_count);
  return record;
}

MetricsSummary summarize_metrics(const std::vector<RepetitionRecord>& reps, bool calibrated) {
  std::vector<double> nll, ece, brier, acc;
  for (const auto& r : reps) {
    const MetricsReport& m = calibrated ? r.calibrated : r.uncalibrated;
    nll.push_back(m.nll_mean);
    ece.push_back(m.ece);
    brier.push_back(m.brier_mean);
    acc.push_back(m.accuracy);
  }
  return {summarize(nll), summarize(ece), summarize(brier), summarize(acc)};
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg, int threads) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  const DataSources data = load_sources(cfg);

  std::vector<std::optional<double>> conditions;
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) conditions.emplace_back(v);
  } else {
    conditions.emplace_back(std::nullopt);
  }
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  const std::size_t total = conditions.size() * reps;
  std::vector<RepetitionRecord> results(total);
  std::vector<std::exception_ptr> errors(total);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t c = task / reps;
      try {
        results[task] = run_repetition(cfg, data, c, conditions[c].value_or(0.0),
                                       static_cast<int>(task % reps));
      } catch (...) {
        errors[task] = std::current_exception();
      }
    }
  };
  const int n_threads =
      std::max(1, std::min(threads > 0 ? threads : default_thread_count(), static_cast<int>(total)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  Report report;
  report.config = cfg;
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    ConditionRecord record;
    record.condition = conditions[c];
    record.repetitions.assign(results.begin() + static_cast<std::ptrdiff_t>(c * reps),
                              results.begin() + static_cast<std::ptrdiff_t>((c + 1) * reps));
    if (is_temperature_method(cfg.method)) {
      std::vector<double> temps;
      for (const auto& r : record.repetitions) temps.push_back(*r.fit.temperature);
      record.temperature = summarize(temps);
    }
    if (cfg.method == Method::kUts) {
      std::vector<double> ws;
      for (const auto& r : record.repetitions) ws.push_back(*r.fit.w_star);
      record.w_star = summarize(ws);
    }
    record.calibrated = summarize_metrics(record.repetitions, true);
    record.uncalibrated = summarize_metrics(record.repetitions, false);
    report.records.push_back(std::move(record));
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json to_json_value(const SyntheticSpec& s) {
  return {{"class_count", s.class_count},       {"sample_count", s.sample_count},
          {"logit_scale", s.logit_scale},       {"priors", optional_json(s.priors)},
          {"miscalibration_w", s.miscalibration_w}, {"seed", s.seed}};
}

SyntheticSpec synthetic_from(const json& j) {
  SyntheticSpec s;
  s.class_count = j.at("class_count").get<std::size_t>();
  s.sample_count = j.at("sample_count").get<std::size_t>();
  s.logit_scale = j.at("logit_scale").get<double>();
  s.priors = optional_from<std::vector<double>>(j, "priors");
  s.miscalibration_w = j.at("miscalibration_w").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

json config_json(const ExperimentConfig& c) {
  json j;
  j["method"] = to_string(c.method);
  j["synthetic"] = c.synthetic ? to_json_value(*c.synthetic) : json(nullptr);
  j["data_path"] = optional_json(c.data_path);
  j["calibration_path"] = optional_json(c.calibration_path);
  j["test_path"] = optional_json(c.test_path);
  j["target_w"] = c.target_w;
  j["calibration_domain"] =
      c.calibration_domain
          ? json(*c.calibration_domain == CalibrationDomain::kSource ? "source" : "target")
          : json(nullptr);
  j["priors"] = {{"kind", to_string(c.priors.kind)},
                 {"values", c.priors.values},
                 {"path", c.priors.path}};
  j["sweep"] = c.sweep ? json{{"kind", to_string(c.sweep->kind)}, {"values", c.sweep->values}}
                       : json(nullptr);
  j["seed"] = c.seed;
  j["repetitions"] = c.repetitions;
  j["calibration_fraction"] = c.calibration_fraction;
  j["scalar_search"] = {{"lower", c.scalar.lower},
                        {"upper", c.scalar.upper},
                        {"tolerance", c.scalar.tolerance},
                        {"max_iterations", c.scalar.max_iterations}};
  j["gradient_descent"] = {{"learning_rate", c.gradient_descent.learning_rate},
                           {"max_iterations", c.gradient_descent.max_iterations},
                           {"gradient_tolerance", c.gradient_descent.gradient_tolerance},
                           {"l2_penalty", c.gradient_descent.l2_penalty}};
  j["bin_count"] = c.bin_count;
  return j;
}

// Missing keys fall back to defaults so that hand-written config files can
// stay short.
ExperimentConfig config_from(const json& j) {
  ExperimentConfig c;
  c.method = parse_method(j.value("method", std::string("ts")));
  if (j.contains("synthetic") && !j.at("synthetic").is_null()) {
    c.synthetic = synthetic_from(j.at("synthetic"));
  }
  c.data_path = optional_from<std::string>(j, "data_path");
  c.calibration_path = optional_from<std::string>(j, "calibration_path");
  c.test_path = optional_from<std::string>(j, "test_path");
  c.target_w = j.value("target_w", c.target_w);
  if (auto domain = optional_from<std::string>(j, "calibration_domain")) {
    if (*domain == "source") {
      c.calibration_domain = CalibrationDomain::kSource;
    } else if (*domain == "target") {
      c.calibration_domain = CalibrationDomain::kTarget;
    } else {
      throw Error(ErrorCode::kParse, "calibration_domain must be 'source' or 'target'");
    }
  }
  if (j.contains("priors")) {
    const json& p = j.at("priors");
    c.priors.kind = parse_priors_kind(p.value("kind", std::string("uniform")));
    c.priors.values = p.value("values", std::vector<double>{});
    c.priors.path = p.value("path", std::string());
  }
  if (j.contains("sweep") && !j.at("sweep").is_null()) {
    const json& s = j.at("sweep");
    c.sweep = Sweep{parse_sweep_kind(s.at("kind").get<std::string>()),
                    s.at("values").get<std::vector<double>>()};
  }
  c.seed = j.value("seed", c.seed);
  c.repetitions = j.value("repetitions", c.repetitions);
  c.calibration_fraction = j.value("calibration_fraction", c.calibration_fraction);
  if (j.contains("scalar_search")) {
    const json& s = j.at("scalar_search");
    c.scalar.lower = s.value("lower", c.scalar.lower);
    c.scalar.upper = s.value("upper", c.scalar.upper);
    c.scalar.tolerance = s.value("tolerance", c.scalar.tolerance);
    c.scalar.max_iterations = s.value("max_iterations", c.scalar.max_iterations);
  }
  if (j.contains("gradient_descent")) {
    const json& g = j.at("gradient_descent");
    auto& gd = c.gradient_descent;
    gd.learning_rate = g.value("learning_rate", gd.learning_rate);
    gd.max_iterations = g.value("max_iterations", gd.max_iterations);
    gd.gradient_tolerance = g.value("gradient_tolerance", gd.gradient_tolerance);
    gd.l2_penalty = g.value("l2_penalty", gd.l2_penalty);
  }
  c.bin_count = j.value("bin_count", c.bin_count);
  return c;
}

json metrics_json(const MetricsReport& m) {
  return {{"nll_mean", m.nll_mean},
          {"ece", m.ece},
          {"brier_mean", m.brier_mean},
          {"accuracy", m.accuracy},
          {"bins",
           {{"bin_count", m.bins.bin_count},
            {"sample_count", m.bins.sample_count},
            {"mean_confidence", m.bins.mean_confidence},
            {"accuracy", m.bins.accuracy}}}};
}

MetricsReport metrics_from(const json& j) {
  MetricsReport m;
  m.nll_mean = j.at("nll_mean").get<double>();
  m.ece = j.at("ece").get<double>();
  m.brier_mean = j.at("brier_mean").get<double>();
  m.accuracy = j.at("accuracy").get<double>();
  const json& b = j.at("bins");
  m.bins.bin_count = b.at("bin_count").get<int>();
  m.bins.sample_count = b.at("sample_count").get<std::vector<std::size_t>>();
  m.bins.mean_confidence = b.at("mean_confidence").get<std::vector<double>>();
  m.bins.accuracy = b.at("accuracy").get<std::vector<double>>();
  return m;
}

json stat_json(const Stat& s) { return {{"mean", s.mean}, {"std", s.std}}; }
Stat stat_from(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

json summary_json(const MetricsSummary& s) {
  return {{"nll", stat_json(s.nll)},
          {"ece", stat_json(s.ece)},
          {"brier", stat_json(s.brier)},
          {"accuracy", stat_json(s.accuracy)}};
}

MetricsSummary summary_from(const json& j) {
  return {stat_from(j.at("nll")), stat_from(j.at("ece")), stat_from(j.at("brier")),
          stat_from(j.at("accuracy"))};
}

json report_json(const Report& r, bool include_timing) {
  json records = json::array();
  for (const auto& rec : r.records) {
    json reps = json::array();
    for (const auto& rep : rec.repetitions) {
      reps.push_back({{"index", rep.index},
                      {"seed", rep.seed},
                      {"fit",
                       {{"temperature", optional_json(rep.fit.temperature)},
                        {"w_star", optional_json(rep.fit.w_star)},
                        {"final_loss", rep.fit.final_loss},
                        {"iterations", rep.fit.iterations},
                        {"converged", rep.fit.converged}}},
                      {"calibrated", metrics_json(rep.calibrated)},
                      {"uncalibrated", metrics_json(rep.uncalibrated)}});
    }
    records.push_back({{"condition", optional_json(rec.condition)},
                       {"repetitions", std::move(reps)},
                       {"temperature", rec.temperature ? stat_json(*rec.temperature) : json(nullptr)},
                       {"w_star", rec.w_star ? stat_json(*rec.w_star) : json(nullptr)},
                       {"calibrated", summary_json(rec.calibrated)},
                       {"uncalibrated", summary_json(rec.uncalibrated)}});
  }
  json j = {{"toolkit", {{"name", "tempcal"}, {"version", r.toolkit_version}}},
            {"config", config_json(r.config)},
            {"condition_kind", r.config.sweep ? json(to_string(r.config.sweep->kind)) : json(nullptr)},
            {"records", std::move(records)}};
  if (include_timing && r.wall_time_seconds) j["wall_time_seconds"] = *r.wall_time_seconds;
  return j;
}

void require_finite(const json& j, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    throw Error(ErrorCode::kNonFinite, "report contains a non-finite number at " + path);
  }
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) require_finite(value, path + "/" + key);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) require_finite(j[i], path + "/" + std::to_string(i));
  }
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string report_to_json(const Report& report, bool include_timing) {
  const json j = report_json(report, include_timing);
  require_finite(j, "");
  return j.dump(2) + "\n";
}

Report report_from_json(const std::string& text) {
  const json j = parse_json(text);
  try {
    Report r;
    r.toolkit_version = j.at("toolkit").at("version").get<std::string>();
    r.config = config_from(j.at("config"));
    for (const json& rec : j.at("records")) {
      ConditionRecord c;
      c.condition = optional_from<double>(rec, "condition");
      for (const json& rep : rec.at("repetitions")) {
        RepetitionRecord rr;
        rr.index = rep.at("index").get<int>();
        rr.seed = rep.at("seed").get<std::uint64_t>();
        const json& fit = rep.at("fit");
        rr.fit.temperature = optional_from<double>(fit, "temperature");
        rr.fit.w_star = optional_from<double>(fit, "w_star");
        rr.fit.final_loss = fit.at("final_loss").get<double>();
        rr.fit.iterations = fit.at("iterations").get<int>();
        rr.fit.converged = fit.at("converged").get<bool>();
        rr.calibrated = metrics_from(rep.at("calibrated"));
        rr.uncalibrated = metrics_from(rep.at("uncalibrated"));
        c.repetitions.push_back(std::move(rr));
      }
      if (!rec.at("temperature").is_null()) c.temperature = stat_from(rec.at("temperature"));
      if (!rec.at("w_star").is_null()) c.w_star = stat_from(rec.at("w_star"));
      c.calibrated = summary_from(rec.at("calibrated"));
      c.uncalibrated = summary_from(rec.at("uncalibrated"));
      r.records.push_back(std::move(c));
    }
    r.wall_time_seconds = optional_from<double>(j, "wall_time_seconds");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed report: ") + e.what());
  }
}

void save_report(const Report& report, const std::string& path, bool include_timing) {
  write_text_file(path, report_to_json(report, include_timing));
}

Report load_report(const std::string& path) { return report_from_json(read_text_file(path)); }

std::string config_to_json(const ExperimentConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

ExperimentConfig config_from_json(const std::string& text) {
  try {
    return config_from(parse_json(text));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("malformed config: ") + e.what());
  }
}

}  // namespace tempcal
