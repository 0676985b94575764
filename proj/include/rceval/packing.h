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

#ifndef RCEVAL_PACKING_H_
#define RCEVAL_PACKING_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rceval/tokenizer.h"

namespace rceval::learned {

enum class Field { kPassage = 0, kQuestion = 1, kReference = 2, kCandidate = 3 };

constexpr std::array<Field, 4> kAllFields = {Field::kPassage, Field::kQuestion,
                                             Field::kReference,
                                             Field::kCandidate};

std::string_view ToString(Field field);

// Subset of the four input fields kept in the encoder input.
class FieldSet {
 public:
  constexpr FieldSet() = default;
  static constexpr FieldSet All() { return FieldSet(0b1111); }

  // Names: passage, question, reference, candidate. Throws UsageError on an
  // unknown name.
  static FieldSet FromNames(const std::vector<std::string>& names);
  std::vector<std::string> Names() const;

  bool Has(Field f) const { return bits_ & Bit(f); }
  FieldSet& Insert(Field f) {
    bits_ |= Bit(f);
    return *this;
  }
  bool empty() const { return bits_ == 0; }
  uint8_t bits() const { return bits_; }

  bool operator==(const FieldSet&) const = default;

 private:
  constexpr explicit FieldSet(uint8_t bits) : bits_(bits) {}
  static constexpr uint8_t Bit(Field f) {
    return static_cast<uint8_t>(1u << static_cast<int>(f));
  }
  uint8_t bits_ = 0;
};

// Half-open token range [begin, end).
struct SegmentSpan {
  int begin = 0;
  int end = 0;
  int size() const { return end - begin; }
};

// [CLS] passage [SEP] question [SEP] reference [SEP] candidate [SEP]
struct PackedInput {
  std::vector<int> token_ids;
  std::vector<std::string> tokens;  // surface form; "[CLS]" / "[SEP]" markers
  std::vector<int> segment_ids;     // field index; CLS is 0, each SEP joins
                                    // the segment it closes
  std::vector<int> attention_mask;
  std::array<SegmentSpan, 4> segments;  // indexed by Field
  std::array<int, 4> separators{};
  int passage_tokens_dropped = 0;
  int question_tokens_dropped = 0;

  int size() const { return static_cast<int>(token_ids.size()); }
  const SegmentSpan& segment(Field f) const {
    return segments[static_cast<int>(f)];
  }
  std::vector<std::string> SegmentTokens(Field f) const;
};

// Fields outside `ablation` are emptied (their separators remain). When the
// result would exceed `max_length`, the passage and then the question are
// truncated from their ends; reference and candidate are never truncated
// and LengthError is thrown when they alone do not fit.
PackedInput PackInput(std::string_view passage, std::string_view question,
                      std::string_view reference, std::string_view candidate,
                      FieldSet ablation, const HashingTokenizer& tokenizer,
                      int max_length);

}  // namespace rceval::learned

#endif  // RCEVAL_PACKING_H_
