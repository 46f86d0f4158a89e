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

#include "syhgt/alignment.hpp"

#include <string>

#include "syhgt/error.hpp"

namespace syhgt {
namespace {

std::string span_str(std::size_t b, std::size_t e) {
  return "[" + std::to_string(b) + "," + std::to_string(e) + ")";
}

}  // namespace

Alignment align_subwords_to_lexemes(std::span<const SubwordToken> subwords,
                                    std::span<const LexemeToken> lexemes) {
  Alignment out;
  out.groups.resize(lexemes.size());
  std::size_t lex = 0;
  for (std::size_t i = 0; i < subwords.size(); ++i) {
    const SubwordToken& sw = subwords[i];
    if (sw.is_special) continue;
    // Lexemes are in offset order, so skip the ones entirely before `sw`.
    while (lex < lexemes.size() && lexemes[lex].char_end <= sw.char_start) {
      ++lex;
    }
    if (lex == lexemes.size() || lexemes[lex].char_start >= sw.char_end) {
      throw AlignmentError("subword '" + sw.text + "' at " +
                           span_str(sw.char_start, sw.char_end) +
                           " is not covered by any lexeme");
    }
    const LexemeToken& l = lexemes[lex];
    if (sw.char_start < l.char_start || sw.char_end > l.char_end) {
      throw AlignmentError("subword '" + sw.text + "' at " +
                           span_str(sw.char_start, sw.char_end) +
                           " straddles lexeme '" + l.form + "' at " +
                           span_str(l.char_start, l.char_end));
    }
    out.groups[lex].push_back(i);
  }
  for (std::size_t j = 0; j < lexemes.size(); ++j) {
    if (out.groups[j].empty()) {
      throw AlignmentError(
          "lexeme '" + lexemes[j].form + "' at " +
          span_str(lexemes[j].char_start, lexemes[j].char_end) +
          " has no subwords");
    }
  }
  return out;
}

}  // namespace syhgt
