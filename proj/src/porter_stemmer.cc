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

#include "rceval/porter_stemmer.h"

#include <algorithm>
#include <array>
#include <utility>

namespace rceval::lexical {
namespace {

class Stemmer {
 public:
  explicit Stemmer(std::string word) : b_(std::move(word)) {}

  std::string Run() {
    if (b_.size() <= 2) return b_;
    Step1ab();
    if (b_.size() > 1) {
      Step1c();
      Step2();
      Step3();
      Step4();
      Step5();
    }
    return b_;
  }

 private:
  // True when b_[i] is a consonant.
  bool Cons(int i) const {
    switch (b_[i]) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !Cons(i - 1);
      default:
        return true;
    }
  }

  // Number of VC sequences in b_[0, j_].
  int Measure() const {
    int n = 0;
    int i = 0;
    while (true) {
      if (i > j_) return n;
      if (!Cons(i)) break;
      ++i;
    }
    ++i;
    while (true) {
      while (true) {
        if (i > j_) return n;
        if (Cons(i)) break;
        ++i;
      }
      ++i;
      ++n;
      while (true) {
        if (i > j_) return n;
        if (!Cons(i)) break;
        ++i;
      }
      ++i;
    }
  }

  bool VowelInStem() const {
    for (int i = 0; i <= j_; ++i) {
      if (!Cons(i)) return true;
    }
    return false;
  }

  bool DoubleCons(int j) const {
    if (j < 1) return false;
    if (b_[j] != b_[j - 1]) return false;
    return Cons(j);
  }

  // consonant-vowel-consonant ending at i, last consonant not w, x or y.
  bool Cvc(int i) const {
    if (i < 2 || !Cons(i) || Cons(i - 1) || !Cons(i - 2)) return false;
    const char ch = b_[i];
    return ch != 'w' && ch != 'x' && ch != 'y';
  }

  // On match sets j_ to the index before the suffix.
  bool Ends(std::string_view s) {
    const int k = static_cast<int>(b_.size()) - 1;
    const int len = static_cast<int>(s.size());
    if (len > k + 1) return false;
    if (b_.compare(k - len + 1, len, s) != 0) return false;
    j_ = k - len;
    return true;
  }

  void SetTo(std::string_view s) {
    b_.resize(j_ + 1);
    b_.append(s);
  }

  void ReplaceIfMeasured(std::string_view s) {
    if (Measure() > 0) SetTo(s);
  }

  int Last() const { return static_cast<int>(b_.size()) - 1; }

  void Step1ab() {
    if (b_.back() == 's') {
      if (Ends("sses")) {
        b_.resize(b_.size() - 2);
      } else if (Ends("ies")) {
        SetTo("i");
      } else if (b_.size() >= 2 && b_[b_.size() - 2] != 's') {
        b_.pop_back();
      }
    }
    if (Ends("eed")) {
      if (Measure() > 0) b_.pop_back();
    } else if ((Ends("ed") || Ends("ing")) && VowelInStem()) {
      b_.resize(j_ + 1);
      if (Ends("at")) {
        SetTo("ate");
      } else if (Ends("bl")) {
        SetTo("ble");
      } else if (Ends("iz")) {
        SetTo("ize");
      } else if (DoubleCons(Last())) {
        const char ch = b_.back();
        if (ch != 'l' && ch != 's' && ch != 'z') b_.pop_back();
      } else {
        j_ = Last();
        if (Measure() == 1 && Cvc(Last())) b_.push_back('e');
      }
    }
  }

  void Step1c() {
    if (Ends("y") && VowelInStem()) b_.back() = 'i';
  }

  void Step2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                21>
        kRules = {{{"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
                   {"anci", "ance"},   {"izer", "ize"},    {"bli", "ble"},
                   {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
                   {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
                   {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
                   {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
                   {"iviti", "ive"},   {"biliti", "ble"},  {"logi", "log"}}};
    for (const auto& [suffix, repl] : kRules) {
      if (Ends(suffix)) {
        ReplaceIfMeasured(repl);
        return;
      }
    }
  }

  void Step3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>,
                                7>
        kRules = {{{"icate", "ic"},
                   {"ative", ""},
                   {"alize", "al"},
                   {"iciti", "ic"},
                   {"ical", "ic"},
                   {"ful", ""},
                   {"ness", ""}}};
    for (const auto& [suffix, repl] : kRules) {
      if (Ends(suffix)) {
        ReplaceIfMeasured(repl);
        return;
      }
    }
  }

  void Step4() {
    static constexpr std::array<std::string_view, 19> kSuffixes = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible",
        "ant", "ement", "ment", "ent", "ion", "ou",  "ism",
        "ate", "iti",  "ous",  "ive", "ize"};
    for (std::string_view suffix : kSuffixes) {
      if (!Ends(suffix)) continue;
      if (suffix == "ion" &&
          (j_ < 0 || (b_[j_] != 's' && b_[j_] != 't'))) {
        return;
      }
      // "ement" is tried before "ment" and "ent"; a failed measure on the
      // longest match ends the step, as in the reference implementation.
      if (Measure() > 1) b_.resize(j_ + 1);
      return;
    }
  }

  void Step5() {
    j_ = Last();
    if (b_.back() == 'e') {
      j_ = Last() - 1;
      const int m = Measure();
      if (m > 1 || (m == 1 && !Cvc(Last() - 1))) b_.pop_back();
    }
    j_ = Last();
    if (b_.back() == 'l' && DoubleCons(Last()) && Measure() > 1) {
      b_.pop_back();
    }
  }

  std::string b_;
  int j_ = 0;
};

}  // namespace

std::string PorterStem(std::string_view word) {
  if (!std::all_of(word.begin(), word.end(),
                   [](char c) { return c >= 'a' && c <= 'z'; })) {
    return std::string(word);
  }
  return Stemmer(std::string(word)).Run();
}

}  // namespace rceval::lexical
