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

#ifndef TEMPCAL_ERROR_H_
#define TEMPCAL_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace tempcal {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDataset,
  kMissingLabels,
  kEmptyDataset,
  kShapeMismatch,
  kNonFinite,
  kDivergence,
  kParse,
  kIo,
};

// Stable identifier used in machine-readable error output.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tempcal

#endif  // TEMPCAL_ERROR_H_
