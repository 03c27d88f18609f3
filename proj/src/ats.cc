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

#include "tempcal/ats.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tempcal/error.h"
#include "tempcal/metrics.h"
#include "tempcal/softmax.h"

namespace tempcal {
namespace {

double complement(std::span<const double> probs, std::size_t excluded) {
  double sum = 0.0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (c != excluded) sum += probs[c];
  }
  return std::max(sum, kProbabilityFloor);
}

void check_members(const LogitDataset& ds, const std::vector<std::vector<std::size_t>>& members) {
  if (members.size() != ds.class_count()) {
    throw Error(ErrorCode::kShapeMismatch,
                "assignment has " + std::to_string(members.size()) + " member sets for " +
                    std::to_string(ds.class_count()) + " classes");
  }
  for (std::size_t k = 0; k < members.size(); ++k) {
    for (std::size_t i : members[k]) {
      if (i >= ds.sample_count()) {
        throw Error(ErrorCode::kInvalidArgument, "invalid member index " + std::to_string(i) +
                                                     " in class " + std::to_string(k));
      }
    }
  }
}

}  // namespace

bool AttendedAssignment::empty() const {
  return std::all_of(members.begin(), members.end(), [](const auto& m) { return m.empty(); });
}

AttendedAssignment build_assignment(const LogitDataset& ds) {
  const Labels& labels = ds.require_labels();
  const auto predicted = predictions(ds.logits());
  AttendedAssignment out;
  out.rule = AssignmentRule::kDefault;
  out.members.resize(ds.class_count());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(labels[i]);
    out.members[y].push_back(i);
    if (predicted[i] != y) out.members[predicted[i]].push_back(i);
  }
  return out;
}

AttendedAssignment build_assignment(const LogitDataset& ds,
                                    std::vector<std::vector<std::size_t>> members) {
  ds.require_labels();
  check_members(ds, members);
  return {std::move(members), AssignmentRule::kExternal};
}

double ats_term(std::span<const double> probs, std::size_t k, std::size_t label) {
  // -log S_k - log(1 - S_label) + log(1 - S_k); the last two cancel exactly
  // when label == k, leaving the plain NLL term.
  return clamped_neg_log(probs[k]) -
         (std::log(complement(probs, label)) - std::log(complement(probs, k)));
}

double l_ats(const LogitDataset& ds, const AttendedAssignment& assignment, double temperature) {
  const Labels& labels = ds.require_labels();
  check_members(ds, assignment.members);
  const ProbabilityMatrix probs = tempered_softmax(ds.logits(), temperature);
  double sum = 0.0;
  for (std::size_t k = 0; k < assignment.members.size(); ++k) {
    for (std::size_t i : assignment.members[k]) {
      sum += ats_term(probs.row(i), k, static_cast<std::size_t>(labels[i]));
    }
  }
  return sum;
}

TemperatureFit fit_ats(const LogitDataset& calib, const AttendedAssignment& assignment,
                       const ScalarSearchConfig& cfg) {
  calib.require_labels();
  check_members(calib, assignment.members);
  if (assignment.empty()) throw Error(ErrorCode::kInvalidArgument, "empty assignment");
  const auto objective = [&](double t) { return l_ats(calib, assignment, t); };
  const ScalarSearchResult search = minimize_scalar(objective, cfg);

  TemperatureFit fit;
  fit.temperature = search.argmin;
  fit.final_loss = search.value;
  fit.iterations = search.iterations;
  fit.converged = search.converged;
  if (auto warning = check_grid_bracket(objective, cfg, search.argmin)) {
    fit.warnings.push_back(*warning);
  }
  // Borrowed members predicted as their class reward overconfidence without
  // bound, so the loss can run off to the lower limit.
  if (search.argmin == cfg.lower || search.argmin == cfg.upper) {
    fit.warnings.push_back("temperature " + std::to_string(search.argmin) +
                           " sits on a search bound; the member sets may make L_ATS unbounded");
  }
  return fit;
}

}  // namespace tempcal
