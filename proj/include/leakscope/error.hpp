//
// Copyright 2026 The Leakscope Authors.
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
//

#pragma once

#include <stdexcept>
#include <string>

namespace leakscope {

enum class ErrorKind {
  kValidation,
  kParse,
  kAlphabetMismatch,
  kZeroMarginal,
  kDomain,
  kUnsupportedOrder,
  kInadmissibleStrategy,
  kDecompositionStall,
  kInvalidSplit,
  kInvariant,
};

inline const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return "ValidationError";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kAlphabetMismatch: return "AlphabetMismatch";
    case ErrorKind::kZeroMarginal: return "ZeroMarginal";
    case ErrorKind::kDomain: return "DomainError";
    case ErrorKind::kUnsupportedOrder: return "UnsupportedOrder";
    case ErrorKind::kInadmissibleStrategy: return "InadmissibleStrategy";
    case ErrorKind::kDecompositionStall: return "DecompositionStall";
    case ErrorKind::kInvalidSplit: return "InvalidSplit";
    case ErrorKind::kInvariant: return "InvariantViolation";
  }
  return "Error";
}

// Invariant failures are bugs in this library; everything else is bad input.
inline bool is_internal(ErrorKind kind) {
  return kind == ErrorKind::kDecompositionStall ||
         kind == ErrorKind::kInvariant;
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace leakscope
