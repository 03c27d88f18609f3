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

#ifndef TEMPCAL_TESTS_HELPERS_H_
#define TEMPCAL_TESTS_HELPERS_H_

#include <vector>

#include "oracles.h"
#include "tempcal/dataset.h"
#include "tempcal/matrix.h"
#include "tempcal/softmax.h"

namespace testing {

inline tempcal::Matrix to_matrix(const oracle::Rows& rows) {
  return tempcal::Matrix::from_rows(rows, rows.front().size());
}

inline oracle::Rows to_rows(const tempcal::Matrix& m) {
  oracle::Rows rows;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.emplace_back(row.begin(), row.end());
  }
  return rows;
}

inline tempcal::LogitDataset random_dataset(std::mt19937_64& gen, std::size_t n, std::size_t k,
                                            double scale) {
  return tempcal::LogitDataset(to_matrix(oracle::random_rows(gen, n, k, scale)),
                               oracle::random_labels(gen, n, k));
}

}  // namespace testing

#endif  // TEMPCAL_TESTS_HELPERS_H_
