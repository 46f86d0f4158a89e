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

#ifndef SYHGT_SYNTAX_HPP_
#define SYHGT_SYNTAX_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace syhgt {

// A parser-level word. Offsets are byte offsets into the text the lexeme
// was located in, end exclusive.
struct LexemeToken {
  std::size_t index = 0;  // 1-based position within its sentence
  std::string form;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const LexemeToken&) const = default;
};

struct DependencyParse {
  std::string sent_id;
  std::string text;
  std::vector<LexemeToken> lexemes;
  std::vector<std::size_t> head;  // 0 = root, else 1-based lexeme index
  std::vector<std::string> relation;

  std::size_t size() const { return lexemes.size(); }
};

// Nodes are stored in preorder; node 0 is the root. A leaf carries the
// index of its lexeme and no label; every other node is a constituent or a
// part-of-speech preterminal.
struct ConstituencyNode {
  std::string label;
  std::vector<std::size_t> children;
  std::optional<std::size_t> parent;
  std::optional<std::size_t> lexeme;

  bool is_leaf() const { return lexeme.has_value(); }
};

struct ConstituencyParse {
  std::string text;
  std::vector<LexemeToken> lexemes;
  std::vector<ConstituencyNode> nodes;

  const ConstituencyNode& root() const { return nodes.front(); }
  bool is_preterminal(std::size_t node) const;
  std::size_t internal_node_count() const;
};

// CoNLL-U reader. Multiword ranges ("3-4") and empty nodes ("3.1") are
// skipped. Offsets come from the "# text =" comment when present, otherwise
// from the forms joined by single spaces.
std::vector<DependencyParse> read_conllu(std::string_view text);

// Inverse of read_conllu for the columns it reads; unused columns are "_".
std::string write_conllu(std::span<const DependencyParse> parses);

// Penn Treebank bracketed trees, one per non-blank line. A nameless outer
// wrapper "( (S ...) )" is removed. Errors report a character offset into
// the whole input.
std::vector<ConstituencyParse> read_bracketed(std::string_view text);

std::string write_bracketed(const ConstituencyParse& tree);

// Throws ValidationError when heads are out of range, there is not exactly
// one root, or following heads does not reach the root.
void validate_dependency_parse(const DependencyParse& parse);

// Maps PTB escapes (-LRB-, -RRB-, ...) back to the characters they stand for.
std::string unescape_ptb(std::string_view token);

// Locates each form left to right in `text`, starting at `cursor`, and
// rewrites the lexeme offsets. Returns the offset just past the last lexeme.
// Throws ValidationError if a form cannot be found.
std::size_t locate_lexemes(std::span<LexemeToken> lexemes,
                           std::string_view text, std::size_t cursor = 0);

// Like locate_lexemes, but the first form must start at the first
// non-whitespace byte at or after `cursor`. Returns nullopt (and leaves the
// lexemes untouched) otherwise.
std::optional<std::size_t> anchor_lexemes(std::span<LexemeToken> lexemes,
                                          std::string_view text,
                                          std::size_t cursor);

}  // namespace syhgt

#endif  // SYHGT_SYNTAX_HPP_
