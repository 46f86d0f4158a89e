// Copyright 2026 The SyHGT Authors.
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

#ifndef SYHGT_ALIGNMENT_HPP_
#define SYHGT_ALIGNMENT_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "syhgt/syntax.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt {

// groups[i] lists, in order, the subword indices that make up lexeme i.
// Indices refer to whatever subword sequence the alignment was built
// against. A lexeme needs a virtual vertex when it spans two or more
// subwords.
struct Alignment {
  std::vector<std::vector<std::size_t>> groups;

  std::size_t size() const { return groups.size(); }
  bool needs_virtual(std::size_t lexeme) const {
    return groups.at(lexeme).size() >= 2;
  }
};

// Partitions the non-special subwords among the lexemes. Both inputs must
// carry offsets into the same text and be in offset order. Throws
// AlignmentError when a subword straddles a lexeme boundary, falls outside
// every lexeme, or a lexeme receives no subword.
Alignment align_subwords_to_lexemes(std::span<const SubwordToken> subwords,
                                    std::span<const LexemeToken> lexemes);

}  // namespace syhgt

#endif  // SYHGT_ALIGNMENT_HPP_
