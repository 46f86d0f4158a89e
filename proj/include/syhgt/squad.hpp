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

#ifndef SYHGT_SQUAD_HPP_
#define SYHGT_SQUAD_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace syhgt {

struct GoldAnswer {
  std::string text;
  std::size_t char_start = 0;  // byte offset into the passage

  bool operator==(const GoldAnswer&) const = default;
};

struct QaExample {
  std::string id;
  std::string question;
  std::string passage;
  std::vector<GoldAnswer> gold_answers;
  bool is_impossible = false;
  std::size_t paragraph = 0;  // index into SquadDataset::paragraphs
};

// Every text a parse file must cover, in the order the parses are expected:
// each paragraph's context followed by all of its questions (including
// questions whose example was dropped).
struct TextUnit {
  enum class Kind { Passage, Question };
  Kind kind = Kind::Passage;
  std::size_t paragraph = 0;
  std::string qa_id;  // empty for passages
  std::string text;
};

struct SquadDataset {
  std::vector<QaExample> examples;
  std::vector<std::string> paragraphs;
  std::vector<TextUnit> units;
  std::size_t dropped = 0;
};

// SQuAD 2.0 layout. `answer_start` is a code point offset in the JSON and is
// converted to a byte offset here. Examples whose answer text does not match
// the context at its offset are dropped with a warning and counted.
// Throws ParseError on malformed JSON.
SquadDataset read_squad(std::string_view json_text);

}  // namespace syhgt

#endif  // SYHGT_SQUAD_HPP_
