// Copyright 2026 The rceval Authors.
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

#include "rceval/errors.h"

namespace rceval {

ParseError::ParseError(const std::string& locus, const std::string& message)
    : Error(locus + ": " + message), locus_(locus) {}

ValidationError::ValidationError(const std::string& record_id,
                                 const std::string& invariant,
                                 const std::string& message)
    : Error(record_id + ": " + invariant + ": " + message),
      record_id_(record_id),
      invariant_(invariant) {}

LengthError::LengthError(const std::string& segment, const std::string& message)
    : Error(message), segment_(segment) {}

}  // namespace rceval
