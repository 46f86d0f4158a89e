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

#ifndef SYHGT_WORDPIECE_HPP_
#define SYHGT_WORDPIECE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace syhgt {

struct SubwordToken {
  std::uint32_t id = 0;
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  bool is_special = false;

  bool operator==(const SubwordToken&) const = default;
};

inline constexpr std::string_view kUnkPiece = "[UNK]";
inline constexpr std::string_view kClsPiece = "[CLS]";
inline constexpr std::string_view kSepPiece = "[SEP]";
inline constexpr std::string_view kPadPiece = "[PAD]";

class Vocab {
 public:
  // One piece per line; the id of a piece is its line number (0-based).
  // Throws ConfigError if empty or missing one of the special pieces.
  static Vocab parse(std::string_view text);

  std::optional<std::uint32_t> find(std::string_view piece) const;
  std::uint32_t id_or_unk(std::string_view piece) const;
  const std::string& piece(std::uint32_t id) const { return pieces_.at(id); }
  std::size_t size() const { return pieces_.size(); }

  std::uint32_t unk_id() const { return unk_; }
  SubwordToken special(std::string_view piece) const;

 private:
  std::vector<std::string> pieces_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint32_t unk_ = 0;
};

// Greedy longest-match-first WordPiece over whitespace/punctuation-delimited
// words. Words without a full decomposition (or longer than 100 code points)
// become a single [UNK] spanning the word. Offsets are bytes into `text`.
std::vector<SubwordToken> tokenize_subwords(std::string_view text,
                                            const Vocab& vocab);

struct WordSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// The pre-tokenization step on its own: whitespace separates words and each
// punctuation character is a word by itself.
std::vector<WordSpan> split_words(std::string_view text);

}  // namespace syhgt

#endif  // SYHGT_WORDPIECE_HPP_
