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

#include "pufhsm/error.hpp"

namespace pufhsm {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kUnknownChallenge: return "unknown challenge";
    case ErrorCode::kUnsupported: return "unsupported operation";
    case ErrorCode::kFormat: return "format error";
    case ErrorCode::kWrongKey: return "wrong key";
    case ErrorCode::kCorruption: return "corruption";
    case ErrorCode::kBadSof: return "bad start-of-frame";
    case ErrorCode::kBadCrc: return "bad crc";
    case ErrorCode::kOversize: return "oversize frame";
    case ErrorCode::kTruncated: return "truncated";
    case ErrorCode::kUnknownType: return "unknown message type";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kResource: return "resource error";
    case ErrorCode::kAuthFailed: return "authentication failed";
    case ErrorCode::kDenied: return "access denied";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

}  // namespace pufhsm
