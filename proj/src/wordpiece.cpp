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

#include "syhgt/wordpiece.hpp"

#include "syhgt/error.hpp"
#include "text_util.hpp"

namespace syhgt {
namespace {

constexpr std::size_t kMaxWordChars = 100;

}  // namespace

Vocab Vocab::parse(std::string_view text) {
  Vocab v;
  for (std::string_view line : text_util::split_lines(text)) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto id = static_cast<std::uint32_t>(v.pieces_.size());
    v.pieces_.emplace_back(line);
    if (!line.empty()) v.index_.emplace(std::string(line), id);
  }
  if (v.index_.empty()) throw ConfigError("vocabulary is empty");
  for (std::string_view special : {kUnkPiece, kClsPiece, kSepPiece, kPadPiece}) {
    if (!v.find(special)) {
      throw ConfigError("vocabulary lacks " + std::string(special));
    }
  }
  v.unk_ = *v.find(kUnkPiece);
  return v;
}

std::optional<std::uint32_t> Vocab::find(std::string_view piece) const {
  auto it = index_.find(std::string(piece));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t Vocab::id_or_unk(std::string_view piece) const {
  return find(piece).value_or(unk_);
}

SubwordToken Vocab::special(std::string_view piece) const {
  SubwordToken tok;
  tok.id = id_or_unk(piece);
  tok.text = std::string(piece);
  tok.is_special = true;
  return tok;
}

std::vector<WordSpan> split_words(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t pos = 0;
  constexpr std::size_t kNone = std::string_view::npos;
  std::size_t open = kNone;
  while (pos < text.size()) {
    const std::size_t at = pos;
    const char32_t c = text_util::utf8_next(text, pos);
    if (text_util::is_unicode_space(c) || text_util::is_punctuation(c)) {
      if (open != kNone) words.push_back({open, at});
      open = kNone;
      if (!text_util::is_unicode_space(c)) words.push_back({at, pos});
    } else if (open == kNone) {
      open = at;
    }
  }
  if (open != kNone) words.push_back({open, text.size()});
  return words;
}

std::vector<SubwordToken> tokenize_subwords(std::string_view text,
                                            const Vocab& vocab) {
  std::vector<SubwordToken> out;
  for (const WordSpan& word : split_words(text)) {
    const std::string_view w = text.substr(word.begin, word.end - word.begin);
    // Code point boundaries of the word, as byte offsets relative to `w`.
    std::vector<std::size_t> bounds{0};
    for (std::size_t p = 0; p < w.size();) {
      text_util::utf8_next(w, p);
      bounds.push_back(p);
    }
    std::vector<SubwordToken> pieces;
    bool bad = bounds.size() - 1 > kMaxWordChars;
    std::size_t start = 0;  // index into bounds
    while (!bad && start + 1 < bounds.size()) {
      std::optional<std::uint32_t> match;
      std::size_t end = bounds.size() - 1;
      for (; end > start; --end) {
        std::string candidate(w.substr(bounds[start], bounds[end] - bounds[start]));
        if (start > 0) candidate.insert(0, "##");
        match = vocab.find(candidate);
        if (match) break;
      }
      if (!match) {
        bad = true;
        break;
      }
      SubwordToken tok;
      tok.id = *match;
      tok.text = vocab.piece(*match);
      tok.char_start = word.begin + bounds[start];
      tok.char_end = word.begin + bounds[end];
      pieces.push_back(std::move(tok));
      start = end;
    }
    if (bad) {
      SubwordToken unk;
      unk.id = vocab.unk_id();
      unk.text = std::string(kUnkPiece);
      unk.char_start = word.begin;
      unk.char_end = word.end;
      out.push_back(std::move(unk));
    } else {
      for (auto& p : pieces) out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace syhgt
