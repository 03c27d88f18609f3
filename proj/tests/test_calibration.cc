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

#include <cmath>

#include "doctest.h"
#include "helpers.h"
#include "tempcal/affine.h"
#include "tempcal/ats.h"
#include "tempcal/error.h"
#include "tempcal/metrics.h"
#include "tempcal/synth.h"
#include "tempcal/temperature_scaling.h"
#include "tempcal/uts.h"

using namespace tempcal;

namespace {

SyntheticDataset synthetic(double w, std::uint64_t seed = 1, std::size_t samples = 10000,
                           std::size_t classes = 10) {
  SyntheticSpec spec;
  spec.class_count = classes;
  spec.sample_count = samples;
  spec.miscalibration_w = w;
  spec.seed = seed;
  return generate(spec);
}

}  // namespace

TEST_SUITE("temperature_scaling") {
  TEST_CASE("recovers the miscalibration factor") {
    CHECK(fit_temperature(synthetic(2.5).observed).temperature == doctest::Approx(2.5).epsilon(0.06));
    const double t1 = fit_temperature(synthetic(1.0).observed).temperature;
    CHECK(t1 >= 0.95);
    CHECK(t1 <= 1.05);
  }

  TEST_CASE("summed NLL matches the metrics module bit for bit") {
    std::mt19937_64 gen(1);
    const LogitDataset ds = testing::random_dataset(gen, 200, 4, 3.0);
    for (double t : {0.5, 1.0, 3.0}) {
      CHECK(temperature_nll_sum(ds.logits(), *ds.labels(), t) ==
            nll(tempered_softmax(ds.logits(), t), *ds.labels(), Reduction::kSum));
    }
  }

  TEST_CASE("stationarity residual vanishes only at the optimum") {
    const LogitDataset ds = synthetic(2.5).observed;
    const TemperatureFit fit = fit_temperature(ds);
    const double at_opt = stationarity_residual(ds, fit.temperature);
    CHECK(at_opt < 1e-3);
    CHECK(stationarity_residual(ds, 10 * fit.temperature) > at_opt);
  }

  TEST_CASE("residual at a very large temperature approaches the uniform limit") {
    const LogitDataset ds = validate_dataset({{3.0, 0.0, 0.0}}, Labels{0}, 3);
    CHECK(stationarity_residual(ds, 1e9) == doctest::Approx(3.0 - 1.0).epsilon(1e-6));
  }

  TEST_CASE("apply at T=1 is the plain softmax; closed form at T=2") {
    const LogitDataset ds = validate_dataset({{2.0, 0.0}}, std::nullopt, 2);
    TemperatureFit fit;
    CHECK(apply_temperature(ds, fit) == tempered_softmax(ds.logits(), 1.0));
    fit.temperature = 2.0;
    const ProbabilityMatrix p = apply_temperature(ds, fit);
    CHECK(p(0, 0) == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(p(0, 1) == doctest::Approx(0.268941).epsilon(1e-6));
  }

  TEST_CASE("label noise inflates the fitted temperature") {
    const LogitDataset ds = synthetic(2.5).observed;
    const double clean = fit_temperature(ds).temperature;
    const double noisy = fit_temperature(flip_labels(ds, 0.3, 7)).temperature;
    CHECK(noisy / clean > 1.15);
  }

  TEST_CASE("errors") {
    const LogitDataset unlabeled = validate_dataset({{1, 0}, {0, 1}}, std::nullopt, 2);
    CHECK_THROWS_WITH(fit_temperature(unlabeled), "labels required");
    CHECK_THROWS_AS(fit_temperature(validate_dataset({{1, 0}}, Labels{0}, 2)), Error);
  }
}

TEST_SUITE("uts") {
  TEST_CASE("predicted class weighs exactly one") {
    std::mt19937_64 gen(2);
    const Matrix m = testing::to_matrix(oracle::random_rows(gen, 100, 5, 2.0));
    const WeightMatrix w = weight_fn(m, 1.7);
    const auto pred = predictions(m);
    for (std::size_t i = 0; i < m.rows(); ++i) CHECK(w.weights(i, pred[i]) == 1.0);
  }

  TEST_CASE("binary odds closed form") {
    // f = (1, 0) seen through w = 2; the non-predicted class has true odds e^-1.
    const Matrix m = Matrix::from_rows({{2.0, 0.0}}, 2);
    CHECK(weight_fn(m, 2.0).weights(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    // On the decision boundary the odds are 1 for any w.
    const Matrix tie = Matrix::from_rows({{0.0, 0.0}}, 2);
    CHECK(weight_fn(tie, 3.0).weights(0, 1) == doctest::Approx(1.0));
  }

  TEST_CASE("with more than two classes the weight is a tempered odds, not the true odds") {
    const Matrix m = Matrix::from_rows({{2.0, 1.0, 0.0}}, 3);
    const double w = 2.0;
    const auto s = oracle::softmax({2.0, 1.0, 0.0});
    const auto q = oracle::softmax({1.0, 0.5, 0.0});
    const double expected = std::pow(s[1] / (1 - s[1]), 1 / w);
    CHECK(weight_fn(m, w).weights(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(expected - q[1] / (1 - q[1])) > 1e-3);
  }

  TEST_CASE("weighted NLL reductions") {
    std::mt19937_64 gen(3);
    const LogitDataset ds = testing::random_dataset(gen, 80, 4, 2.0);
    Matrix indicator(80, 4);
    Matrix ones(80, 4);
    for (std::size_t i = 0; i < 80; ++i) {
      indicator(i, (*ds.labels())[i]) = 1.0;
      for (std::size_t k = 0; k < 4; ++k) ones(i, k) = 1.0;
    }
    for (double t : {0.7, 1.0, 2.2}) {
      CHECK(weighted_nll(ds.logits(), {indicator, 1.0}, t) ==
            doctest::Approx(temperature_nll_sum(ds.logits(), *ds.labels(), t)).epsilon(1e-14));
      CHECK(weighted_nll(ds.logits(), {indicator, 1.0}, t, Reduction::kMean) ==
            doctest::Approx(nll(tempered_softmax(ds.logits(), t), *ds.labels())).epsilon(1e-14));
      double brute = 0.0;
      for (const auto& row : testing::to_rows(ds.logits())) {
        for (double p : oracle::softmax(row, t)) brute -= std::log(p);
      }
      CHECK(weighted_nll(ds.logits(), {ones, 1.0}, t) == doctest::Approx(brute).epsilon(1e-12));
    }
    const Matrix z = Matrix::from_rows({{0.0, 0.0}}, 2);
    const Matrix w11 = Matrix::from_rows({{1.0, 1.0}}, 2);
    CHECK(weighted_nll(z, {w11, 1.0}, 1.0) == doctest::Approx(2 * std::log(2.0)).epsilon(1e-14));
  }

  TEST_CASE("w estimate on the reference synthetic sets") {
    const double w25 = fit_w(synthetic(2.5).observed.logits(), ClassPriors::uniform(10));
    CHECK(w25 >= 1.9);
    CHECK(w25 <= 3.1);
    // Without labels the factor is confounded with the logit spread, so the
    // calibrated case lands above 1; this band is from our reference run.
    const double w1 = fit_w(synthetic(1.0).observed.logits(), ClassPriors::uniform(10));
    CHECK(w1 >= 1.25);
    CHECK(w1 <= 1.5);
  }

  TEST_CASE("UTS temperature tracks the supervised fit") {
    const LogitDataset ds = synthetic(2.5).observed;
    const double ts = fit_temperature(ds).temperature;
    const TemperatureFit uts = fit_uts(drop_labels(ds), ClassPriors::uniform(10));
    REQUIRE(uts.w_star.has_value());
    CHECK(std::abs(uts.temperature / ts - 1) < 0.15);
  }

  TEST_CASE("labels are never read") {
    const LogitDataset ds = synthetic(2.5, 2, 2000).observed;
    std::vector<int> other(ds.sample_count(), 0);
    CHECK(fit_uts(ds, ClassPriors::uniform(10)) ==
          fit_uts(with_labels(ds, other), ClassPriors::uniform(10)));
  }

  TEST_CASE("errors") {
    const Matrix empty(0, 3);
    CHECK_THROWS_AS(fit_w(empty, ClassPriors::uniform(3)), Error);
    const Matrix m = Matrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 3);
    CHECK_THROWS_AS(fit_w(m, ClassPriors::uniform(2)), Error);
    CHECK_THROWS_AS(ClassPriors({0.5, 0.6}), Error);
    CHECK_THROWS_AS(ClassPriors({-0.1, 1.1}), Error);
    const Matrix same = Matrix::from_rows({{1, 0}, {2, 0}, {3, 0}}, 2);
    CHECK_THROWS_AS(fit_w(same, ClassPriors({1.0, 0.0})), Error);
  }

  TEST_CASE("empirical priors are label frequencies") {
    const LogitDataset ds = validate_dataset({{1, 0}, {0, 1}, {0, 1}, {0, 1}}, Labels{0, 1, 1, 1}, 2);
    CHECK(empirical_priors(ds).values() == std::vector<double>{0.25, 0.75});
  }
}

TEST_SUITE("ats") {
  TEST_CASE("default assignment rule") {
    // Labels [0,0,1], predictions [0,1,1].
    const LogitDataset ds = validate_dataset({{1, 0}, {0, 1}, {0, 1}}, Labels{0, 0, 1}, 2);
    const AttendedAssignment a = build_assignment(ds);
    CHECK(a.members[0] == std::vector<std::size_t>{0, 1});
    CHECK(a.members[1] == std::vector<std::size_t>{1, 2});
    CHECK(a.rule == AssignmentRule::kDefault);
  }

  TEST_CASE("external sets are validated") {
    const LogitDataset ds = validate_dataset({{1, 0}, {0, 1}}, Labels{0, 1}, 2);
    CHECK_THROWS_AS(build_assignment(ds, {{0}, {2}}), Error);
    CHECK_THROWS_AS(build_assignment(ds, {{0}}), Error);
    CHECK_THROWS_WITH(fit_ats(ds, build_assignment(ds, {{}, {}})), "empty assignment");
  }

  TEST_CASE("true-class members reduce to NLL") {
    std::mt19937_64 gen(4);
    for (int rep = 0; rep < 20; ++rep) {
      const LogitDataset ds = testing::random_dataset(gen, 60, 2 + rep % 5, 2.0);
      std::vector<std::vector<std::size_t>> members(ds.class_count());
      for (std::size_t i = 0; i < ds.sample_count(); ++i) members[(*ds.labels())[i]].push_back(i);
      const AttendedAssignment a = build_assignment(ds, members);
      for (double t : {0.5, 1.3}) {
        const double nll_sum = temperature_nll_sum(ds.logits(), *ds.labels(), t);
        CHECK(std::abs(l_ats(ds, a, t) - nll_sum) <= 1e-12 * std::max(1.0, nll_sum));
      }
    }
  }

  TEST_CASE("binary borrowed member closed form") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> normal(0.0, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
      const std::vector<double> f{normal(gen), normal(gen)};
      const double t = 0.5 + rep * 0.03;
      const auto s = oracle::softmax(f, t);
      CHECK(std::abs(ats_term(s, 0, 1) - oracle::ats_term_two_class(f, 0, 1, t)) < 1e-12);
    }
    const std::vector<double> half{0.5, 0.5};
    CHECK(ats_term(half, 0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }

  TEST_CASE("all-correct data fits like temperature scaling") {
    const LogitDataset ds = validate_dataset({{2, 0}, {0, 1}, {3, 1}, {0, 2}}, Labels{0, 1, 0, 1}, 2);
    const ScalarSearchConfig cfg;
    const double ts = fit_temperature(ds, cfg).temperature;
    const double ats = fit_ats(ds, cfg).temperature;
    CHECK(std::abs(std::log(ats / ts)) <= 2 * cfg.tolerance);
  }

  TEST_CASE("default members on a model with mistakes collapse to the lower bound") {
    // A misclassified sample sits in M_y (NLL term, growing like (f_max - f_y)/T)
    // and in M_pred (borrowed term, falling like -(f_max - f_second)/T). The
    // pair sum is non-positive, so the loss decreases without bound as T -> 0.
    const SyntheticDataset d = synthetic(2.5, 1, 2000);
    const ScalarSearchConfig cfg;
    const TemperatureFit fit = fit_ats(d.observed, cfg);
    CHECK(fit.temperature == cfg.lower);
    CHECK_FALSE(fit.warnings.empty());
    CHECK(l_ats(d.observed, build_assignment(d.observed), 0.01) <
          l_ats(d.observed, build_assignment(d.observed), 2.5));
  }

  TEST_CASE("true-class members alone calibrate like temperature scaling") {
    const SyntheticDataset d = synthetic(2.5);
    std::vector<std::vector<std::size_t>> members(10);
    for (std::size_t i = 0; i < d.labels.size(); ++i) members[d.labels[i]].push_back(i);
    const TemperatureFit fit = fit_ats(d.observed, build_assignment(d.observed, members));
    CHECK(fit.temperature == doctest::Approx(fit_temperature(d.observed).temperature).epsilon(1e-5));
  }
}

TEST_SUITE("affine") {
  TEST_CASE("identity init equals the uncalibrated NLL exactly") {
    std::mt19937_64 gen(6);
    const LogitDataset ds = testing::random_dataset(gen, 150, 5, 3.0);
    const auto objective = affine_objective(ds, 0.0);
    const auto params = pack_affine(AffineParams::identity(5));
    std::vector<double> grad(params.size());
    CHECK(objective(params, grad) == nll(tempered_softmax(ds.logits(), 1.0), *ds.labels()));
  }

  TEST_CASE("analytic gradient matches finite differences") {
    std::mt19937_64 gen(7);
    std::normal_distribution<double> normal(0.0, 0.3);
    for (double l2 : {0.0, 0.1}) {
      const LogitDataset ds = testing::random_dataset(gen, 40, 4, 2.0);
      auto params = pack_affine(AffineParams::identity(4));
      for (auto& p : params) p += normal(gen);
      CHECK(check_gradient(affine_objective(ds, l2), params).max_relative_error < 1e-4);
    }
  }

  TEST_CASE("pack and unpack are inverse") {
    AffineParams p = AffineParams::identity(3);
    p.weight(0, 2) = 0.5;
    p.bias = {1, 2, 3};
    CHECK(unpack_affine(pack_affine(p), 3) == p);
  }

  TEST_CASE("vector mode keeps off-diagonals at zero and never worsens the loss") {
    std::mt19937_64 gen(8);
    const LogitDataset ds = testing::random_dataset(gen, 200, 3, 3.0);
    GradientDescentConfig cfg;
    cfg.max_iterations = 300;
    const AffineFit fit = fit_affine(ds, AffineMode::kVector, cfg);
    CHECK(fit.params.weight(0, 1) == 0.0);
    CHECK(fit.params.weight(2, 0) == 0.0);
    CHECK(fit.final_loss <= nll(tempered_softmax(ds.logits(), 1.0), *ds.labels()));
    const AffineFit full = fit_affine(ds, AffineMode::kMatrix, cfg);
    CHECK(full.final_loss <= nll(tempered_softmax(ds.logits(), 1.0), *ds.labels()));
  }

  TEST_CASE("apply with identity and bias shift") {
    std::mt19937_64 gen(9);
    const LogitDataset ds = testing::random_dataset(gen, 20, 3, 1.0);
    AffineFit fit;
    fit.params = AffineParams::identity(3);
    const ProbabilityMatrix base = apply_affine(ds, fit);
    CHECK(base == tempered_softmax(ds.logits(), 1.0));
    fit.params.bias = {0.7, 0.7, 0.7};
    const ProbabilityMatrix shifted = apply_affine(ds, fit);
    for (std::size_t i = 0; i < 20; ++i) {
      for (std::size_t k = 0; k < 3; ++k) CHECK(shifted(i, k) == doctest::Approx(base(i, k)).epsilon(1e-14));
    }
  }
}
