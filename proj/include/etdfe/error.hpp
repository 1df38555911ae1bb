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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace etdfe {

// Every failure the library reports maps to exactly one of these codes. The
// CLI prints the code name in machine-readable error objects.
enum class ErrorCode {
  kInvalidArgument,
  kBoundTooLarge,
  kOutOfRange,
  kTooFewMeters,
  kEmptyFleet,
  kShapeMismatch,
  kPrivacyViolation,
  kReadingOutOfRange,
  kIncompleteSlot,
  kKeyModelMismatch,
  kBadWeight,
  kDegenerateDataset,
  kParseError,
  kOracleMismatch,
  kSlotReuse,
  kRefuseOverwrite,
  kIoError,
  kFormatError,
  kCryptoError,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace etdfe
