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

#ifndef RCEVAL_TOKENIZER_H_
#define RCEVAL_TOKENIZER_H_

#include <string>
#include <string_view>
#include <vector>

namespace rceval::learned {

struct Token {
  std::string text;
  int id = 0;

  bool operator==(const Token&) const = default;
};

// Word-level tokenizer with a hashed vocabulary: lowercases, splits on
// whitespace, and emits each ASCII punctuation character as its own token.
// Word ids are kNumSpecial + fnv1a(word) % buckets, so no vocabulary file is
// needed and any text is encodable.
class HashingTokenizer {
 public:
  static constexpr int kPadId = 0;
  static constexpr int kUnkId = 1;
  static constexpr int kClsId = 2;
  static constexpr int kSepId = 3;
  static constexpr int kNumSpecial = 4;

  explicit HashingTokenizer(int buckets = 30000);

  int buckets() const { return buckets_; }
  int vocab_size() const { return kNumSpecial + buckets_; }

  std::vector<Token> Tokenize(std::string_view text) const;
  int IdOf(std::string_view word) const;

 private:
  int buckets_;
};

}  // namespace rceval::learned

#endif  // RCEVAL_TOKENIZER_H_
