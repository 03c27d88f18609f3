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

// Command-line front end: synth, calibrate, evaluate, sweep.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tempcal/affine.h"
#include "tempcal/ats.h"
#include "tempcal/error.h"
#include "tempcal/experiment.h"
#include "tempcal/io.h"
#include "tempcal/metrics.h"
#include "tempcal/softmax.h"
#include "tempcal/synth.h"
#include "tempcal/temperature_scaling.h"
#include "tempcal/uts.h"

namespace {

using json = nlohmann::json;
using namespace tempcal;

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    write_text_file(out_path, text);
  }
}

PriorsSource priors_source(const std::string& text) {
  PriorsSource p;
  if (text.empty() || text == "uniform") return p;
  const std::string prefix = "empirical:";
  if (text.rfind(prefix, 0) == 0) {
    p.kind = PriorsKind::kEmpiricalFile;
    p.path = text.substr(prefix.size());
    return p;
  }
  p.kind = PriorsKind::kExplicit;
  p.values = parse_double_list(text);
  return p;
}

AttendedAssignment load_assignment(const LogitDataset& calib, const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "invalid assignment file: " + std::string(e.what()));
  }
  std::vector<std::vector<std::size_t>> members;
  try {
    members = j.at("members").get<std::vector<std::vector<std::size_t>>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, "assignment file needs a `members` array of index lists");
  }
  return build_assignment(calib, members);
}

struct SynthOptions {
  SyntheticSpec spec;
  std::string priors;
  std::string out;
};

void run_synth(const SynthOptions& opt) {
  SyntheticSpec spec = opt.spec;
  if (!opt.priors.empty() && opt.priors != "uniform") spec.priors = parse_double_list(opt.priors);
  spec.validate();
  const SyntheticDataset data = generate(spec);
  if (opt.out.empty()) throw Error(ErrorCode::kInvalidArgument, "--out is required");
  save_dataset(data.observed, opt.out);
  json side = {{"spec",
                {{"class_count", spec.class_count},
                 {"sample_count", spec.sample_count},
                 {"logit_scale", spec.logit_scale},
                 {"priors", spec.priors ? json(*spec.priors) : json(nullptr)},
                 {"miscalibration_w", spec.miscalibration_w},
                 {"seed", spec.seed}}},
               {"true_w", data.w},
               {"class_offsets", data.offsets},
               {"empirical_priors", data.empirical_priors}};
  write_text_file(opt.out + ".json", side.dump(2) + "\n");
}

struct CalibrateOptions {
  std::string method = "ts";
  std::string calib;
  std::string apply;
  std::string priors = "uniform";
  std::string assignment;
  std::string out;
  std::string probs_out;
  ScalarSearchConfig scalar;
  GradientDescentConfig gd;
};

json fit_to_json(const TemperatureFit& fit, const std::string& method) {
  return {{"method", method},
          {"temperature", fit.temperature},
          {"w_star", fit.w_star ? json(*fit.w_star) : json(nullptr)},
          {"final_loss", fit.final_loss},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"warnings", fit.warnings}};
}

json fit_to_json(const AffineFit& fit, const std::string& method) {
  std::vector<std::vector<double>> weight;
  for (std::size_t r = 0; r < fit.params.weight.rows(); ++r) {
    const auto row = fit.params.weight.row(r);
    weight.emplace_back(row.begin(), row.end());
  }
  return {{"method", method},
          {"weight", weight},
          {"bias", fit.params.bias},
          {"final_loss", fit.final_loss},
          {"iterations", fit.iterations},
          {"converged", fit.converged},
          {"warnings", fit.warnings}};
}

void run_calibrate(const CalibrateOptions& opt) {
  const Method method = parse_method(opt.method);
  const LogitDataset calib = load_dataset(opt.calib);
  json out;
  std::optional<ProbabilityMatrix> probs;
  std::optional<LogitDataset> target;
  if (!opt.apply.empty()) target = load_dataset(opt.apply);
  if (method == Method::kVector || method == Method::kMatrix) {
    const AffineFit fit = fit_affine(
        calib, method == Method::kMatrix ? AffineMode::kMatrix : AffineMode::kVector, opt.gd);
    out = fit_to_json(fit, opt.method);
    if (target) probs = apply_affine(*target, fit);
  } else {
    TemperatureFit fit;
    if (method == Method::kTs) {
      fit = fit_temperature(calib, opt.scalar);
    } else if (method == Method::kUts) {
      fit = fit_uts(calib.logits(), parse_priors(opt.priors, calib.class_count()), opt.scalar);
    } else {
      const AttendedAssignment assignment =
          opt.assignment.empty() ? build_assignment(calib) : load_assignment(calib, opt.assignment);
      fit = fit_ats(calib, assignment, opt.scalar);
    }
    out = fit_to_json(fit, opt.method);
    if (target) probs = apply_temperature(*target, fit);
  }
  if (!opt.probs_out.empty()) {
    if (!probs) throw Error(ErrorCode::kInvalidArgument, "--probs-out needs --apply");
    save_probabilities(*probs, opt.probs_out);
  }
  if (probs && target && target->has_labels()) {
    const MetricsReport m = evaluate(*probs, *target->labels());
    out["metrics"] = {{"nll_mean", m.nll_mean},
                      {"ece", m.ece},
                      {"brier_mean", m.brier_mean},
                      {"accuracy", m.accuracy}};
  }
  for (const auto& w : out["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
  emit(opt.out, out.dump(2) + "\n");
}

struct EvaluateOptions {
  std::string data;
  std::string fit;
  double temperature = 1.0;
  int bins = kDefaultBinCount;
  std::string out;
};

ProbabilityMatrix probabilities_from_fit(const LogitDataset& ds, const json& fit) {
  if (fit.contains("temperature")) {
    return tempered_softmax(ds.logits(), fit.at("temperature").get<double>());
  }
  const auto weight = fit.at("weight").get<std::vector<std::vector<double>>>();
  if (weight.empty()) throw Error(ErrorCode::kParse, "fit file has an empty weight matrix");
  AffineParams params{Matrix::from_rows(weight, weight.front().size()), fit.at("bias").get<std::vector<double>>()};
  if (params.weight.rows() != ds.class_count() || params.bias.size() != ds.class_count()) {
    throw Error(ErrorCode::kShapeMismatch, "fit parameters do not match the dataset class count");
  }
  return tempered_softmax(affine_transform(ds.logits(), params), 1.0);
}

void run_evaluate(const EvaluateOptions& opt) {
  const LogitDataset ds = load_dataset(opt.data);
  const Labels& labels = ds.require_labels();
  std::optional<ProbabilityMatrix> probs;
  if (!opt.fit.empty()) {
    json fit;
    try {
      fit = json::parse(read_text_file(opt.fit));
      probs = probabilities_from_fit(ds, fit);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, "invalid fit file: " + std::string(e.what()));
    }
  } else {
    probs = tempered_softmax(ds.logits(), opt.temperature);
  }
  const MetricsReport m = evaluate(*probs, labels, opt.bins);
  json out = {{"nll_mean", m.nll_mean},
              {"ece", m.ece},
              {"brier_mean", m.brier_mean},
              {"accuracy", m.accuracy},
              {"bins",
               {{"bin_count", m.bins.bin_count},
                {"sample_count", m.bins.sample_count},
                {"mean_confidence", m.bins.mean_confidence},
                {"accuracy", m.bins.accuracy}}}};
  emit(opt.out, out.dump(2) + "\n");
}

struct SweepOptions {
  std::string config_path;
  std::string method = "ts";
  std::string data;
  std::string calib;
  std::string test;
  bool synthetic = false;
  SyntheticSpec spec;
  std::string spec_priors;
  std::string priors = "uniform";
  std::string noise_rates;
  std::string shift_severities;
  std::string calib_sizes;
  double target_w = 1.0;
  std::string domain;
  std::uint64_t seed = 0;
  int reps = 20;
  double calib_fraction = 0.2;
  int bins = kDefaultBinCount;
  int threads = 0;
  bool timing = false;
  bool print_config = false;
  std::string out;
};

ExperimentConfig sweep_config(const SweepOptions& opt) {
  if (!opt.config_path.empty()) return config_from_json(read_text_file(opt.config_path));
  ExperimentConfig cfg;
  cfg.method = parse_method(opt.method);
  if (opt.synthetic) {
    cfg.synthetic = opt.spec;
    if (!opt.spec_priors.empty() && opt.spec_priors != "uniform") {
      cfg.synthetic->priors = parse_double_list(opt.spec_priors);
    }
  }
  if (!opt.data.empty()) cfg.data_path = opt.data;
  if (!opt.calib.empty()) cfg.calibration_path = opt.calib;
  if (!opt.test.empty()) cfg.test_path = opt.test;
  cfg.priors = priors_source(opt.priors);
  int sweeps = 0;
  if (!opt.noise_rates.empty()) {
    cfg.sweep = Sweep{SweepKind::kNoise, parse_double_list(opt.noise_rates)};
    ++sweeps;
  }
  if (!opt.shift_severities.empty()) {
    cfg.sweep = Sweep{SweepKind::kShift, parse_double_list(opt.shift_severities)};
    ++sweeps;
  }
  if (!opt.calib_sizes.empty()) {
    cfg.sweep = Sweep{SweepKind::kCalibSize, parse_double_list(opt.calib_sizes)};
    ++sweeps;
  }
  if (sweeps > 1) throw Error(ErrorCode::kInvalidArgument, "give at most one sweep");
  cfg.target_w = opt.target_w;
  if (opt.domain == "source") cfg.calibration_domain = CalibrationDomain::kSource;
  if (opt.domain == "target") cfg.calibration_domain = CalibrationDomain::kTarget;
  cfg.seed = opt.seed;
  cfg.repetitions = opt.reps;
  cfg.calibration_fraction = opt.calib_fraction;
  cfg.bin_count = opt.bins;
  return cfg;
}

void run_sweep(const SweepOptions& opt) {
  const ExperimentConfig cfg = sweep_config(opt);
  if (opt.print_config) {
    cfg.validate();
    emit(opt.out, config_to_json(cfg));
    return;
  }
  const Report report = run_experiment(cfg, opt.threads);
  emit(opt.out, report_to_json(report, opt.timing));
}

void add_synthetic_flags(CLI::App* cmd, SyntheticSpec& spec, std::string& priors) {
  cmd->add_option("--classes", spec.class_count, "Number of classes K")->capture_default_str();
  cmd->add_option("--samples", spec.sample_count, "Number of samples L")->capture_default_str();
  cmd->add_option("--scale", spec.logit_scale, "Standard deviation of the true logits")
      ->capture_default_str();
  cmd->add_option("--w", spec.miscalibration_w, "Miscalibration factor applied to the logits")
      ->capture_default_str();
  cmd->add_option("--class-priors", priors, "Class priors as a comma-separated list");
  cmd->add_option("--data-seed", spec.seed, "Seed of the synthetic generator")
      ->capture_default_str();
}

void add_search_flags(CLI::App* cmd, ScalarSearchConfig& scalar) {
  cmd->add_option("--t-min", scalar.lower, "Lower temperature bound")->capture_default_str();
  cmd->add_option("--t-max", scalar.upper, "Upper temperature bound")->capture_default_str();
  cmd->add_option("--tol", scalar.tolerance, "Search tolerance in log space")
      ->capture_default_str();
}

int report_error(const std::string& code, const std::string& message) {
  const json err = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << err.dump() << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tempcal: post-hoc temperature calibration toolkit"};
  app.set_version_flag("--version", std::string(tempcal::kToolkitVersion));
  app.require_subcommand(1);

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic logit dataset");
  add_synthetic_flags(synth_cmd, synth.spec, synth.priors);
  synth_cmd->add_option("--seed", synth.spec.seed, "Alias of --data-seed");
  synth_cmd->add_option("--out", synth.out, "Output CSV; a sidecar <out>.json is written too")
      ->required();

  CalibrateOptions cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Fit a calibration method on a CSV file");
  cal_cmd->add_option("--method", cal.method, "ts, uts, vector, matrix or ats")
      ->capture_default_str();
  cal_cmd->add_option("--calib", cal.calib, "Calibration CSV")->required();
  cal_cmd->add_option("--apply", cal.apply, "CSV to apply the fitted calibration to");
  cal_cmd->add_option("--priors", cal.priors, "uts priors: uniform, a list, or empirical:PATH")
      ->capture_default_str();
  cal_cmd->add_option("--assignment", cal.assignment, "ats member lists as JSON");
  cal_cmd->add_option("--probs-out", cal.probs_out, "Write calibrated probabilities of --apply");
  cal_cmd->add_option("--out", cal.out, "Fit JSON (stdout when omitted)");
  add_search_flags(cal_cmd, cal.scalar);
  cal_cmd->add_option("--lr", cal.gd.learning_rate, "Affine learning rate")->capture_default_str();
  cal_cmd->add_option("--max-iter", cal.gd.max_iterations, "Affine iteration cap")
      ->capture_default_str();
  cal_cmd->add_option("--l2", cal.gd.l2_penalty, "Affine L2 penalty toward identity")
      ->capture_default_str();

  EvaluateOptions ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Compute NLL, ECE, Brier and accuracy");
  ev_cmd->add_option("--data", ev.data, "Labeled CSV")->required();
  auto* fit_opt = ev_cmd->add_option("--fit", ev.fit, "Fit JSON written by calibrate");
  ev_cmd->add_option("--temperature", ev.temperature, "Temperature when no fit is given")
      ->excludes(fit_opt);
  ev_cmd->add_option("--bins", ev.bins, "ECE bin count")->capture_default_str();
  ev_cmd->add_option("--out", ev.out, "Metrics JSON (stdout when omitted)");

  SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Run a repeated experiment, optionally over a sweep");
  sw_cmd->add_option("--config", sw.config_path, "Experiment config JSON; other flags are ignored");
  sw_cmd->add_option("--method", sw.method, "ts, uts, vector, matrix or ats")
      ->capture_default_str();
  sw_cmd->add_flag("--synthetic", sw.synthetic, "Use a synthetic pool");
  add_synthetic_flags(sw_cmd, sw.spec, sw.spec_priors);
  sw_cmd->add_option("--data", sw.data, "Labeled CSV split per repetition");
  sw_cmd->add_option("--calib", sw.calib, "Fixed calibration CSV");
  sw_cmd->add_option("--test", sw.test, "Fixed test CSV");
  sw_cmd->add_option("--priors", sw.priors, "uts priors: uniform, a list, or empirical:PATH")
      ->capture_default_str();
  sw_cmd->add_option("--noise-rates", sw.noise_rates, "Label flip rates, comma-separated");
  sw_cmd->add_option("--shift-severities", sw.shift_severities, "Shift severities");
  sw_cmd->add_option("--calib-sizes", sw.calib_sizes, "Calibration set sizes");
  sw_cmd->add_option("--target-w", sw.target_w, "Miscalibration factor of the shifted domain")
      ->capture_default_str();
  sw_cmd->add_option("--calib-domain", sw.domain, "source or target")
      ->check(CLI::IsMember({"source", "target"}));
  sw_cmd->add_option("--seed", sw.seed, "Experiment seed")->capture_default_str();
  sw_cmd->add_option("--reps", sw.reps, "Repetitions per condition")->capture_default_str();
  sw_cmd->add_option("--calib-fraction", sw.calib_fraction, "Calibration share of the split")
      ->capture_default_str();
  sw_cmd->add_option("--bins", sw.bins, "ECE bin count")->capture_default_str();
  sw_cmd->add_option("--threads", sw.threads, "Worker threads (default TEMPCAL_THREADS or 1)");
  sw_cmd->add_flag("--timing", sw.timing, "Include wall time in the report");
  sw_cmd->add_flag("--print-config", sw.print_config, "Print the resolved config and exit");
  sw_cmd->add_option("--out", sw.out, "Report JSON (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what());
  }

  try {
    if (*synth_cmd) run_synth(synth);
    if (*cal_cmd) run_calibrate(cal);
    if (*ev_cmd) run_evaluate(ev);
    if (*sw_cmd) run_sweep(sw);
  } catch (const Error& e) {
    return report_error(std::string(error_code_name(e.code())), e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
