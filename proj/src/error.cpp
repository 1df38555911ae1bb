// Copyright 2026 The ETDFE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "etdfe/error.hpp"

namespace etdfe {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kBoundTooLarge: return "BoundTooLarge";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kTooFewMeters: return "TooFewMeters";
    case ErrorCode::kEmptyFleet: return "EmptyFleet";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kPrivacyViolation: return "PrivacyViolation";
    case ErrorCode::kReadingOutOfRange: return "ReadingOutOfRange";
    case ErrorCode::kIncompleteSlot: return "IncompleteSlot";
    case ErrorCode::kKeyModelMismatch: return "KeyModelMismatch";
    case ErrorCode::kBadWeight: return "BadWeight";
    case ErrorCode::kDegenerateDataset: return "DegenerateDataset";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kOracleMismatch: return "OracleMismatch";
    case ErrorCode::kSlotReuse: return "SlotReuse";
    case ErrorCode::kRefuseOverwrite: return "RefuseOverwrite";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kCryptoError: return "CryptoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
      code_(code) {}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace etdfe
