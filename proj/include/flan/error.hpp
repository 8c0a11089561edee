// Copyright 2026 The FLAN Graph Authors
// SPDX-License-Identifier: Apache-2.0
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

namespace flan {

enum class ErrorCode {
  kInvalidArgument,
  kInvariantViolation,
  kParseError,
  kMalformedReference,
  kEmptySegment,
  kNoIdentity,
  kMissingAncestor,
  kBadMagic,
  kDimMismatch,
  kTruncatedFile,
  kDuplicateKey,
  kMissingEmbedding,
  kNonFinite,
  kShapeMismatch,
  kNonFiniteLoss,
  kSingleClass,
  kEmptyInput,
  kIoError,
};

constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMalformedReference: return "MalformedReference";
    case ErrorCode::kEmptySegment: return "EmptySegment";
    case ErrorCode::kNoIdentity: return "NoIdentity";
    case ErrorCode::kMissingAncestor: return "MissingAncestor";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kSingleClass: return "SingleClass";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

// Every recoverable failure in the library is reported as a flan::Error
// carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace flan
