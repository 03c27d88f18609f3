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

#ifndef TEMPCAL_IO_H_
#define TEMPCAL_IO_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "tempcal/dataset.h"
#include "tempcal/uts.h"

namespace tempcal {

// CSV layout: header `f_0,...,f_{K-1}` with an optional trailing `label`
// column, then one sample per row. Labels are 0-based. Parsing is strict:
// every row needs every cell, and errors name the offending line.
LogitDataset read_dataset(std::istream& in, const std::string& source_name = "<stream>");
LogitDataset load_dataset(const std::string& path);

void write_dataset(std::ostream& out, const LogitDataset& ds);
void save_dataset(const LogitDataset& ds, const std::string& path);

// Header `p_0,...,p_{K-1}`.
void save_probabilities(const ProbabilityMatrix& probs, const std::string& path);

// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

// "0.1,0.2,0.7" -> {0.1, 0.2, 0.7}. Throws Error(kParse).
std::vector<double> parse_double_list(const std::string& text);

// `uniform`, a comma-separated vector, or `empirical:PATH` (label
// frequencies of a labeled CSV).
ClassPriors parse_priors(const std::string& text, std::size_t class_count);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace tempcal

#endif  // TEMPCAL_IO_H_
