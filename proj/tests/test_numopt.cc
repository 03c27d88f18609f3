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
#include "tempcal/error.h"
#include "tempcal/numopt.h"

using namespace tempcal;

TEST_SUITE("numopt") {
  TEST_CASE("golden-section finds an interior minimum") {
    const auto f = [](double t) { return std::pow(std::log(t) - std::log(2.5), 2); };
    const ScalarSearchResult r = minimize_scalar(f, {});
    CHECK(r.converged);
    CHECK(std::abs(std::log(r.argmin / 2.5)) < 1e-5);
  }

  TEST_CASE("monotone objectives end at a bound") {
    const ScalarSearchConfig cfg;
    CHECK(minimize_scalar([](double t) { return t; }, cfg).argmin == cfg.lower);
    CHECK(minimize_scalar([](double t) { return -t; }, cfg).argmin == cfg.upper);
  }

  TEST_CASE("non-finite objective values are errors") {
    CHECK_THROWS_AS(minimize_scalar([](double) { return NAN; }, {}), Error);
  }

  TEST_CASE("bad configuration") {
    ScalarSearchConfig cfg;
    cfg.lower = 2.0;
    cfg.upper = 1.0;
    CHECK_THROWS_AS(minimize_scalar([](double t) { return t; }, cfg), Error);
    GradientDescentConfig gd;
    gd.learning_rate = 0.0;
    CHECK_THROWS_AS(gd.validate(), Error);
  }

  TEST_CASE("grid bracket flags a second basin") {
    // Two wells in log space; the search may land in either one, the grid
    // scan sees the deeper one.
    const auto f = [](double t) {
      const double x = std::log(t);
      return std::min((x + 3) * (x + 3), (x - 3) * (x - 3) - 1.0);
    };
    CHECK(check_grid_bracket(f, {}, std::exp(-3.0)).has_value());
    CHECK_FALSE(check_grid_bracket(f, {}, std::exp(3.0)).has_value());
  }

  TEST_CASE("gradient descent on a quadratic") {
    const DifferentiableObjective f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 2 * (x[0] - 1);
      g[1] = 4 * (x[1] + 2);
      return (x[0] - 1) * (x[0] - 1) + 2 * (x[1] + 2) * (x[1] + 2);
    };
    GradientDescentConfig cfg;
    cfg.learning_rate = 0.1;
    const GradientDescentResult r = minimize_gd(f, {0.0, 0.0}, cfg);
    CHECK(r.converged);
    CHECK(r.params[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.params[1] == doctest::Approx(-2.0).epsilon(1e-5));
  }

  TEST_CASE("gradient projection freezes coordinates") {
    const DifferentiableObjective f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 2 * (x[0] - 1);
      g[1] = 2 * (x[1] - 1);
      return (x[0] - 1) * (x[0] - 1) + (x[1] - 1) * (x[1] - 1);
    };
    GradientDescentConfig cfg;
    cfg.learning_rate = 0.1;
    const auto r = minimize_gd(f, {0.0, 0.0}, cfg, [](std::span<double> g) { g[1] = 0.0; });
    CHECK(r.params[1] == 0.0);
    CHECK(r.params[0] == doctest::Approx(1.0).epsilon(1e-5));
  }

  TEST_CASE("divergence is reported") {
    const DifferentiableObjective f = [](std::span<const double> x, std::span<double> g) {
      g[0] = 2 * x[0];
      return x[0] * x[0];
    };
    GradientDescentConfig cfg;
    cfg.learning_rate = 5.0;
    CHECK_THROWS_AS(minimize_gd(f, {1.0}, cfg), Error);
  }

  TEST_CASE("finite-difference check detects a wrong gradient") {
    const DifferentiableObjective good = [](std::span<const double> x, std::span<double> g) {
      g[0] = std::cos(x[0]);
      return std::sin(x[0]);
    };
    const DifferentiableObjective bad = [](std::span<const double> x, std::span<double> g) {
      g[0] = 1.1 * std::cos(x[0]);
      return std::sin(x[0]);
    };
    const std::vector<double> at{0.3};
    CHECK(check_gradient(good, at).max_relative_error < 1e-8);
    CHECK(check_gradient(bad, at).max_relative_error > 0.05);
  }
}
