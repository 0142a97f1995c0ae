// Copyright 2026 The pufhsm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PUFHSM_ERROR_HPP_
#define PUFHSM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace pufhsm {

// Numeric values are shared with the C API status codes in pufhsm.h.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kUnknownChallenge = 2,
  kUnsupported = 3,
  kFormat = 4,
  kWrongKey = 5,
  kCorruption = 6,
  kBadSof = 7,
  kBadCrc = 8,
  kOversize = 9,
  kTruncated = 10,
  kUnknownType = 11,
  kIo = 12,
  kResource = 13,
  kAuthFailed = 14,
  kDenied = 15,
  kInternal = 99,
};

const char* ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void Require(bool condition, const std::string& message) {
  if (!condition) Fail(ErrorCode::kInvalidArgument, message);
}

}  // namespace pufhsm

#endif  // PUFHSM_ERROR_HPP_
