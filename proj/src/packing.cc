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

#include "rceval/packing.h"

#include <algorithm>

#include "rceval/errors.h"

namespace rceval::learned {

std::string_view ToString(Field field) {
  switch (field) {
    case Field::kPassage:
      return "passage";
    case Field::kQuestion:
      return "question";
    case Field::kReference:
      return "reference";
    case Field::kCandidate:
      return "candidate";
  }
  return "passage";
}

FieldSet FieldSet::FromNames(const std::vector<std::string>& names) {
  FieldSet set;
  for (const auto& name : names) {
    bool found = false;
    for (Field f : kAllFields) {
      if (name == ToString(f)) {
        set.Insert(f);
        found = true;
      }
    }
    if (!found) throw UsageError("unknown input field: " + name);
  }
  return set;
}

std::vector<std::string> FieldSet::Names() const {
  std::vector<std::string> names;
  for (Field f : kAllFields) {
    if (Has(f)) names.emplace_back(ToString(f));
  }
  return names;
}

std::vector<std::string> PackedInput::SegmentTokens(Field f) const {
  const SegmentSpan& span = segment(f);
  return {tokens.begin() + span.begin, tokens.begin() + span.end};
}

PackedInput PackInput(std::string_view passage, std::string_view question,
                      std::string_view reference, std::string_view candidate,
                      FieldSet ablation, const HashingTokenizer& tokenizer,
                      int max_length) {
  const std::string_view texts[4] = {passage, question, reference, candidate};
  std::array<std::vector<Token>, 4> fields;
  for (Field f : kAllFields) {
    if (ablation.Has(f)) {
      fields[static_cast<int>(f)] = tokenizer.Tokenize(texts[static_cast<int>(f)]);
    }
  }
  auto& p = fields[0];
  auto& q = fields[1];
  const int fixed = 5;  // CLS + four separators
  const int ref_len = static_cast<int>(fields[2].size());
  const int cand_len = static_cast<int>(fields[3].size());
  if (fixed + ref_len > max_length) {
    throw LengthError("reference",
                      "reference segment (" + std::to_string(ref_len) +
                          " tokens) overflows max length " +
                          std::to_string(max_length));
  }
  if (fixed + ref_len + cand_len > max_length) {
    throw LengthError("candidate",
                      "reference + candidate segments (" +
                          std::to_string(ref_len + cand_len) +
                          " tokens) overflow max length " +
                          std::to_string(max_length));
  }

  PackedInput packed;
  int excess = fixed + static_cast<int>(p.size() + q.size()) + ref_len +
               cand_len - max_length;
  if (excess > 0) {
    const int cut = std::min<int>(excess, static_cast<int>(p.size()));
    p.resize(p.size() - cut);
    packed.passage_tokens_dropped = cut;
    excess -= cut;
  }
  if (excess > 0) {
    const int cut = std::min<int>(excess, static_cast<int>(q.size()));
    q.resize(q.size() - cut);
    packed.question_tokens_dropped = cut;
  }

  auto push = [&packed](int id, std::string text, int segment) {
    packed.token_ids.push_back(id);
    packed.tokens.push_back(std::move(text));
    packed.segment_ids.push_back(segment);
    packed.attention_mask.push_back(1);
  };
  push(HashingTokenizer::kClsId, "[CLS]", 0);
  for (int s = 0; s < 4; ++s) {
    packed.segments[s].begin = packed.size();
    for (auto& tok : fields[s]) push(tok.id, std::move(tok.text), s);
    packed.segments[s].end = packed.size();
    packed.separators[s] = packed.size();
    push(HashingTokenizer::kSepId, "[SEP]", s);
  }
  return packed;
}

}  // namespace rceval::learned
