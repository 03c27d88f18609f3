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
#include "tempcal/error.h"
#include "tempcal/metrics.h"
#include "tempcal/softmax.h"

using namespace tempcal;

TEST_SUITE("softmax") {
  TEST_CASE("matches a long double reference") {
    std::mt19937_64 gen(1);
    const auto rows = oracle::random_rows(gen, 50, 7, 5.0);
    for (double t : {0.3, 1.0, 4.0}) {
      const ProbabilityMatrix p = tempered_softmax(testing::to_matrix(rows), t);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto ref = oracle::softmax(rows[i], t);
        for (std::size_t k = 0; k < 7; ++k) CHECK(p(i, k) == doctest::Approx(ref[k]).epsilon(1e-14));
      }
    }
  }

  TEST_CASE("large logits stay finite") {
    const Matrix m = Matrix::from_rows({{1e4, -1e4, 0.0}}, 3);
    const ProbabilityMatrix p = tempered_softmax(m, 1.0);
    CHECK(p(0, 0) == 1.0);
    CHECK(p(0, 1) == 0.0);
  }

  TEST_CASE("rejects bad temperatures") {
    const Matrix m = Matrix::from_rows({{1, 2}}, 2);
    CHECK_THROWS_AS(tempered_softmax(m, 0.0), Error);
    CHECK_THROWS_AS(tempered_softmax(m, -1.0), Error);
  }

  TEST_CASE("temperature never changes the prediction") {
    std::mt19937_64 gen(2);
    const Matrix m = testing::to_matrix(oracle::random_rows(gen, 200, 5, 3.0));
    const auto base = predictions(m);
    for (double t : {0.01, 0.5, 2.0, 100.0}) CHECK(predictions(tempered_softmax(m, t).values()) == base);
  }

  TEST_CASE("affine identity reproduces the logits") {
    std::mt19937_64 gen(3);
    const Matrix m = testing::to_matrix(oracle::random_rows(gen, 10, 4, 2.0));
    CHECK(affine_transform(m, AffineParams::identity(4)) == m);
    CHECK(rescale_logits(m, 2.0)(3, 1) == 2.0 * m(3, 1));
  }
}

TEST_SUITE("metrics") {
  TEST_CASE("bin edges are left-open, right-closed") {
    CHECK(confidence_bin(0.0, 15) == 0);
    CHECK(confidence_bin(1.0 / 15, 15) == 0);
    CHECK(confidence_bin(std::nextafter(1.0 / 15, 1.0), 15) == 1);
    CHECK(confidence_bin(1.0, 15) == 14);
    CHECK(confidence_bin(0.5, 2) == 0);
    for (int b = 1; b < 15; ++b) {
      const double edge = static_cast<double>(b) / 15;
      CHECK(confidence_bin(edge, 15) == b - 1);
    }
  }

  TEST_CASE("ECE agrees with the brute-force oracle") {
    std::mt19937_64 gen(4);
    for (int rep = 0; rep < 30; ++rep) {
      const std::size_t k = 2 + rep % 6;
      const auto rows = oracle::random_rows(gen, 300, k, 0.5 + rep * 0.2);
      const auto y = oracle::random_labels(gen, 300, k);
      oracle::Rows p;
      for (const auto& r : rows) p.push_back(oracle::softmax(r));
      const ProbabilityMatrix probs(testing::to_matrix(p));
      CHECK(ece(probs, y) == oracle::ece(p, y, 15));
      CHECK(ece(probs, y, 7) == oracle::ece(p, y, 7));
    }
  }

  TEST_CASE("NLL and Brier against direct sums") {
    std::mt19937_64 gen(5);
    const auto rows = oracle::random_rows(gen, 500, 6, 2.0);
    const auto y = oracle::random_labels(gen, 500, 6);
    oracle::Rows p;
    for (const auto& r : rows) p.push_back(oracle::softmax(r));
    const ProbabilityMatrix probs(testing::to_matrix(p));
    CHECK(std::abs(nll(probs, y) - oracle::nll(p, y)) < 1e-12);
    CHECK(std::abs(brier(probs, y) - oracle::brier(p, y)) < 1e-12);
    CHECK(std::abs(nll(probs, y, Reduction::kSum) / 500 - oracle::nll(p, y)) < 1e-12);
  }

  TEST_CASE("hand-computed values") {
    const ProbabilityMatrix p(Matrix::from_rows({{0.9, 0.1}, {0.4, 0.6}}, 2));
    const Labels y{0, 0};
    CHECK(nll(p, y) == doctest::Approx((-std::log(0.9) - std::log(0.4)) / 2));
    // Brier with 1/K: ((0.01 + 0.01) / 2 + (0.36 + 0.36) / 2) / 2.
    CHECK(brier(p, y) == doctest::Approx(0.185));
    CHECK(accuracy(p, y) == 0.5);
    // Bins: 0.9 -> bin 13 (hit), 0.6 -> bin 8 (miss).
    CHECK(ece(p, y) == doctest::Approx(0.5 * 0.1 + 0.5 * 0.6));
  }

  TEST_CASE("zero probability on the label is floored") {
    const ProbabilityMatrix p(Matrix::from_rows({{1.0, 0.0}}, 2));
    CHECK(nll(p, {1}) == doctest::Approx(-std::log(1e-12)));
    CHECK(clamped_neg_log(0.0) == -std::log(kProbabilityFloor));
  }

  TEST_CASE("perfectly calibrated bins give zero ECE") {
    // Confidence 0.75 with three of four correct.
    const ProbabilityMatrix p(Matrix::from_rows({{0.75, 0.25}, {0.75, 0.25}, {0.75, 0.25}, {0.75, 0.25}}, 2));
    CHECK(ece(p, {0, 0, 0, 1}) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("evaluate bundles consistent metrics") {
    std::mt19937_64 gen(6);
    const auto rows = oracle::random_rows(gen, 100, 3, 1.5);
    const auto y = oracle::random_labels(gen, 100, 3);
    const ProbabilityMatrix probs = tempered_softmax(testing::to_matrix(rows), 1.0);
    const MetricsReport m = evaluate(probs, y);
    CHECK(m.nll_mean == nll(probs, y));
    CHECK(m.ece == ece(probs, y));
    CHECK(m.brier_mean == brier(probs, y));
    CHECK(m.accuracy == accuracy(probs, y));
    std::size_t total = 0;
    for (auto c : m.bins.sample_count) total += c;
    CHECK(total == 100);
  }

  TEST_CASE("input errors") {
    const ProbabilityMatrix p(Matrix::from_rows({{0.5, 0.5}}, 2));
    CHECK_THROWS_AS(nll(p, {2}), Error);
    CHECK_THROWS_AS(nll(p, {0, 1}), Error);
    CHECK_THROWS_AS(ece(p, {0}, 0), Error);
    CHECK_THROWS_AS(ProbabilityMatrix(Matrix::from_rows({{0.5, 0.6}}, 2)), Error);
  }
}
