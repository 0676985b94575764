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

#ifndef RCEVAL_PORTER_STEMMER_H_
#define RCEVAL_PORTER_STEMMER_H_

#include <string>
#include <string_view>

namespace rceval::lexical {

// The original Porter (1980) suffix-stripping stemmer for lowercase ASCII
// words. Words containing non-letters are returned unchanged.
std::string PorterStem(std::string_view word);

}  // namespace rceval::lexical

#endif  // RCEVAL_PORTER_STEMMER_H_
