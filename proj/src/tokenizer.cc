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

#include "rceval/tokenizer.h"

#include <cctype>

#include "rceval/errors.h"
#include "rceval/hashing.h"

namespace rceval::learned {

HashingTokenizer::HashingTokenizer(int buckets) : buckets_(buckets) {
  if (buckets <= 0) throw PreconditionError("tokenizer needs >= 1 bucket");
}

int HashingTokenizer::IdOf(std::string_view word) const {
  if (word.empty()) return kUnkId;
  return kNumSpecial + static_cast<int>(Fnv1a64(word) %
                                        static_cast<uint64_t>(buckets_));
}

std::vector<Token> HashingTokenizer::Tokenize(std::string_view text) const {
  std::vector<Token> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    const int id = IdOf(current);
    tokens.push_back({std::move(current), id});
    current.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      current.push_back(static_cast<char>(c));
      flush();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  flush();
  return tokens;
}

}  // namespace rceval::learned
