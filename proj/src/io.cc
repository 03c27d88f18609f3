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

#include "tempcal/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tempcal/error.h"

namespace tempcal {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::string& source, std::size_t line) {
  return source + " line " + std::to_string(line) + ": ";
}

bool parse_finite(std::string_view cell, double& out) {
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

}  // namespace

LogitDataset read_dataset(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParse, source_name + ": missing header");
  }
  ++line_no;
  const auto header = split_cells(line);
  std::size_t k = header.size();
  bool labeled = false;
  if (k > 0 && header.back() == "label") {
    labeled = true;
    --k;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (header[c] != "f_" + std::to_string(c)) {
      throw Error(ErrorCode::kParse, where(source_name, line_no) + "malformed header: expected f_" +
                                         std::to_string(c) + ", found '" +
                                         std::string(header[c]) + "'");
    }
  }
  if (k < 2) {
    throw Error(ErrorCode::kParse,
                where(source_name, line_no) + "malformed header: need at least 2 logit columns");
  }

  std::vector<double> values;
  Labels labels;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::kParse, where(source_name, line_no) + "expected " +
                                         std::to_string(header.size()) + " fields, found " +
                                         std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      if (!parse_finite(cells[c], v)) {
        throw Error(ErrorCode::kParse, where(source_name, line_no) + "invalid logit '" +
                                           std::string(cells[c]) + "' in column " +
                                           std::to_string(c));
      }
      values.push_back(v);
    }
    if (labeled) {
      const auto cell = cells[k];
      Label y = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), y);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kParse, where(source_name, line_no) + "invalid label '" +
                                           std::string(cell) + "'");
      }
      if (y < 0 || static_cast<std::size_t>(y) >= k) {
        throw Error(ErrorCode::kParse, where(source_name, line_no) + "label out of range: " +
                                           std::to_string(y));
      }
      labels.push_back(y);
    }
    ++rows;
  }
  Matrix m(rows, k);
  std::copy(values.begin(), values.end(), m.data().begin());
  return LogitDataset(std::move(m), labeled ? std::optional<Labels>(std::move(labels))
                                            : std::nullopt);
}

LogitDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  return read_dataset(in, path);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_dataset(std::ostream& out, const LogitDataset& ds) {
  const std::size_t k = ds.class_count();
  for (std::size_t c = 0; c < k; ++c) out << (c ? "," : "") << "f_" << c;
  if (ds.has_labels()) out << ",label";
  out << '\n';
  for (std::size_t i = 0; i < ds.sample_count(); ++i) {
    const auto row = ds.logits().row(i);
    for (std::size_t c = 0; c < k; ++c) out << (c ? "," : "") << format_double(row[c]);
    if (ds.has_labels()) out << ',' << (*ds.labels())[i];
    out << '\n';
  }
}

void save_dataset(const LogitDataset& ds, const std::string& path) {
  std::ostringstream out;
  write_dataset(out, ds);
  write_text_file(path, out.str());
}

void save_probabilities(const ProbabilityMatrix& probs, const std::string& path) {
  std::ostringstream out;
  const std::size_t k = probs.class_count();
  for (std::size_t c = 0; c < k; ++c) out << (c ? "," : "") << "p_" << c;
  out << '\n';
  for (std::size_t i = 0; i < probs.sample_count(); ++i) {
    const auto row = probs.row(i);
    for (std::size_t c = 0; c < k; ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
  write_text_file(path, out.str());
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  for (auto cell : split_cells(text)) {
    double v = 0.0;
    if (!parse_finite(cell, v)) {
      throw Error(ErrorCode::kParse, "invalid number '" + std::string(cell) + "' in list");
    }
    out.push_back(v);
  }
  return out;
}

ClassPriors parse_priors(const std::string& text, std::size_t class_count) {
  const std::string prefix = "empirical:";
  std::optional<ClassPriors> priors;
  if (text == "uniform") {
    priors = ClassPriors::uniform(class_count);
  } else if (text.rfind(prefix, 0) == 0) {
    priors = empirical_priors(load_dataset(text.substr(prefix.size())));
  } else {
    priors = ClassPriors(parse_double_list(text));
  }
  if (priors->size() != class_count) {
    throw Error(ErrorCode::kShapeMismatch, "priors have " + std::to_string(priors->size()) +
                                               " entries, expected " +
                                               std::to_string(class_count));
  }
  return *priors;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << contents;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace tempcal
