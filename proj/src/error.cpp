// Copyright 2026 The dopplive Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dopplive/error.hpp"

namespace dopplive {

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid argument";
    case ErrorKind::kFrequencyAliasing: return "frequency aliasing";
    case ErrorKind::kInsufficientSignal: return "insufficient signal";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kRange: return "range error";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kUndefinedCorrelation: return "undefined correlation";
    case ErrorKind::kEnrollment: return "enrollment error";
    case ErrorKind::kNoMatch: return "no match";
    case ErrorKind::kIo: return "i/o error";
  }
  return "error";
}

}  // namespace dopplive
