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

#ifndef RCEVAL_ERRORS_H_
#define RCEVAL_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rceval {

// Base of every error this library throws. Callers that only need to
// distinguish "ours" from everything else catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. `locus` is a line number, record path, or both.
class ParseError : public Error {
 public:
  ParseError(const std::string& locus, const std::string& message);
  const std::string& locus() const { return locus_; }

 private:
  std::string locus_;
};

// A record violates a type invariant.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& record_id, const std::string& invariant,
                  const std::string& message);
  const std::string& record_id() const { return record_id_; }
  const std::string& invariant() const { return invariant_; }

 private:
  std::string record_id_;
  std::string invariant_;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Packed encoder input cannot fit in the maximum sequence length.
class LengthError : public Error {
 public:
  LengthError(const std::string& segment, const std::string& message);
  const std::string& segment() const { return segment_; }

 private:
  std::string segment_;
};

class UndefinedCorrelationError : public Error {
 public:
  using Error::Error;
};

class MissingScoreError : public Error {
 public:
  using Error::Error;
};

// Checkpoint is truncated, from another format version, or incomplete.
class CheckpointError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace rceval

#endif  // RCEVAL_ERRORS_H_
