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

#include "syhgt/syntax.hpp"

#include <charconv>
#include <string>

#include "syhgt/error.hpp"
#include "text_util.hpp"

namespace syhgt {
namespace {

std::string sentence_name(std::size_t ordinal, const std::string& sent_id) {
  std::string name = "sentence " + std::to_string(ordinal);
  if (!sent_id.empty()) name += " (" + sent_id + ")";
  return name;
}

std::vector<std::string> form_candidates(std::string_view form) {
  std::vector<std::string> out{std::string(form)};
  std::string unescaped = unescape_ptb(form);
  if (unescaped != form) out.push_back(unescaped);
  if (form == "``" || form == "''") out.emplace_back("\"");
  return out;
}

// Matches one of the candidates exactly at `pos`; returns its length.
std::optional<std::size_t> match_at(std::string_view text, std::size_t pos,
                                    const std::vector<std::string>& cands) {
  for (const auto& c : cands) {
    if (!c.empty() && text.substr(pos, c.size()) == c) return c.size();
  }
  return std::nullopt;
}

std::string join_forms(const std::vector<LexemeToken>& lexemes) {
  std::string text;
  for (const auto& lex : lexemes) {
    if (!text.empty()) text += ' ';
    text += unescape_ptb(lex.form);
  }
  return text;
}

std::optional<long> parse_long(std::string_view s) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

}  // namespace

bool ConstituencyParse::is_preterminal(std::size_t node) const {
  const auto& n = nodes.at(node);
  return !n.is_leaf() && n.children.size() == 1 &&
         nodes[n.children.front()].is_leaf();
}

std::size_t ConstituencyParse::internal_node_count() const {
  std::size_t count = 0;
  for (const auto& n : nodes) count += n.is_leaf() ? 0 : 1;
  return count;
}

std::string unescape_ptb(std::string_view token) {
  if (token == "-LRB-") return "(";
  if (token == "-RRB-") return ")";
  if (token == "-LSB-") return "[";
  if (token == "-RSB-") return "]";
  if (token == "-LCB-") return "{";
  if (token == "-RCB-") return "}";
  return std::string(token);
}

std::size_t locate_lexemes(std::span<LexemeToken> lexemes,
                           std::string_view text, std::size_t cursor) {
  for (auto& lex : lexemes) {
    const auto cands = form_candidates(lex.form);
    const std::size_t at = text_util::skip_space(text, cursor);
    std::optional<std::size_t> len = match_at(text, at, cands);
    std::size_t start = at;
    if (!len) {
      std::size_t best = std::string_view::npos;
      for (const auto& c : cands) {
        const std::size_t found = text.find(c, cursor);
        if (found < best) {
          best = found;
          len = c.size();
        }
      }
      if (best == std::string_view::npos) {
        throw ValidationError("cannot locate form '" + lex.form +
                              "' in text at or after offset " +
                              std::to_string(cursor));
      }
      start = best;
    }
    lex.char_start = start;
    lex.char_end = start + *len;
    cursor = lex.char_end;
  }
  return cursor;
}

std::optional<std::size_t> anchor_lexemes(std::span<LexemeToken> lexemes,
                                          std::string_view text,
                                          std::size_t cursor) {
  if (lexemes.empty()) return cursor;
  const std::size_t at = text_util::skip_space(text, cursor);
  if (!match_at(text, at, form_candidates(lexemes.front().form))) {
    return std::nullopt;
  }
  std::vector<LexemeToken> copy(lexemes.begin(), lexemes.end());
  std::size_t end = 0;
  try {
    end = locate_lexemes(copy, text, at);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  std::copy(copy.begin(), copy.end(), lexemes.begin());
  return end;
}

void validate_dependency_parse(const DependencyParse& parse) {
  const std::size_t n = parse.size();
  const std::string name = parse.sent_id.empty() ? std::string("sentence")
                                                 : parse.sent_id;
  if (parse.head.size() != n || parse.relation.size() != n) {
    throw ValidationError(name + ": head/relation arrays do not match lexemes");
  }
  std::size_t roots = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = parse.head[i];
    if (h > n) {
      throw ValidationError(name + ": head " + std::to_string(h) +
                            " of token " + std::to_string(i + 1) +
                            " out of range");
    }
    if (h == i + 1) {
      throw ValidationError(name + ": token " + std::to_string(i + 1) +
                            " is its own head");
    }
    if (h == 0) ++roots;
  }
  if (n > 0 && roots != 1) {
    throw ValidationError(name + ": expected exactly one root, found " +
                          std::to_string(roots));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t at = i + 1;
    std::size_t steps = 0;
    while (at != 0 && steps <= n) {
      at = parse.head[at - 1];
      ++steps;
    }
    if (at != 0) {
      throw ValidationError(name + ": cycle through token " +
                            std::to_string(i + 1));
    }
  }
}

std::vector<DependencyParse> read_conllu(std::string_view text) {
  std::vector<DependencyParse> out;
  DependencyParse current;
  bool have_text = false;
  bool open = false;

  auto flush = [&]() {
    if (!current.lexemes.empty()) {
      const std::string name = sentence_name(out.size() + 1, current.sent_id);
      if (current.sent_id.empty()) current.sent_id = name;
      validate_dependency_parse(current);
      if (!have_text) current.text = join_forms(current.lexemes);
      try {
        locate_lexemes(current.lexemes, current.text);
      } catch (const ValidationError& e) {
        throw ValidationError(name + ": " + e.what());
      }
      out.push_back(std::move(current));
    }
    current = DependencyParse{};
    have_text = false;
    open = false;
  };

  std::size_t line_no = 0;
  for (std::string_view line : text_util::split_lines(text)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text_util::trim(line).empty()) {
      if (open) flush();
      continue;
    }
    open = true;
    if (line.front() == '#') {
      std::string_view body = text_util::trim(line.substr(1));
      if (body.starts_with("text =")) {
        current.text = std::string(text_util::trim(body.substr(6)));
        have_text = true;
      } else if (body.starts_with("sent_id =")) {
        current.sent_id = std::string(text_util::trim(body.substr(9)));
      }
      continue;
    }
    const auto cols = text_util::split(line, '\t');
    if (cols.size() != 10) {
      throw ParseError("expected 10 tab-separated columns, found " +
                           std::to_string(cols.size()),
                       line_no);
    }
    if (cols[0].find_first_of("-.") != std::string_view::npos) continue;
    const auto index = parse_long(cols[0]);
    const auto head = parse_long(cols[6]);
    if (!index || !head || *index < 1 || *head < 0) {
      throw ParseError("non-numeric or negative index/head column", line_no);
    }
    const std::size_t expected = current.lexemes.size() + 1;
    if (static_cast<std::size_t>(*index) != expected) {
      throw ValidationError(
          sentence_name(out.size() + 1, current.sent_id) + ": token index " +
          std::to_string(*index) + " where " + std::to_string(expected) +
          " was expected");
    }
    LexemeToken lex;
    lex.index = expected;
    lex.form = std::string(cols[1]);
    current.lexemes.push_back(std::move(lex));
    current.head.push_back(static_cast<std::size_t>(*head));
    current.relation.emplace_back(cols[7]);
  }
  flush();
  return out;
}

std::string write_conllu(std::span<const DependencyParse> parses) {
  std::string out;
  for (const auto& p : parses) {
    if (!p.sent_id.empty()) out += "# sent_id = " + p.sent_id + "\n";
    out += "# text = " + p.text + "\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
      out += std::to_string(i + 1) + '\t' + p.lexemes[i].form +
             "\t_\t_\t_\t_\t" + std::to_string(p.head[i]) + '\t' +
             p.relation[i] + "\t_\t_\n";
    }
    out += '\n';
  }
  return out;
}

namespace {

class TreeReader {
 public:
  TreeReader(std::string_view text, std::size_t base)
      : text_(text), base_(base) {}

  ConstituencyParse read() {
    ConstituencyParse tree;
    skip();
    if (pos_ >= text_.size() || text_[pos_] != '(') fail("expected '('");
    read_node(tree, std::nullopt);
    skip();
    if (pos_ != text_.size()) fail("trailing characters after tree");
    unwrap(tree);
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
      const auto& node = tree.nodes[i];
      if (node.is_leaf()) {
        const auto& parent = tree.nodes[*node.parent];
        if (parent.children.size() != 1) {
          throw ValidationError("leaf '" + tree.lexemes[*node.lexeme].form +
                                "' is not under a part-of-speech node");
        }
      } else if (node.children.empty()) {
        throw ValidationError("constituent '" + node.label +
                              "' has no children");
      }
    }
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, base_ + pos_, "position");
  }

  void skip() { pos_ = text_util::skip_space(text_, pos_); }

  std::string_view atom() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
           !text_util::is_space(text_[pos_])) {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  void read_node(ConstituencyParse& tree, std::optional<std::size_t> parent) {
    ++pos_;  // '('
    const std::size_t self = tree.nodes.size();
    tree.nodes.push_back(ConstituencyNode{});
    tree.nodes[self].parent = parent;
    skip();
    if (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')') {
      tree.nodes[self].label = std::string(atom());
    }
    for (;;) {
      skip();
      if (pos_ >= text_.size()) fail("unbalanced parentheses");
      if (text_[pos_] == ')') {
        ++pos_;
        return;
      }
      const std::size_t child = tree.nodes.size();
      tree.nodes[self].children.push_back(child);
      if (text_[pos_] == '(') {
        read_node(tree, self);
      } else {
        LexemeToken lex;
        lex.index = tree.lexemes.size() + 1;
        lex.form = std::string(atom());
        ConstituencyNode leaf;
        leaf.parent = self;
        leaf.lexeme = tree.lexemes.size();
        tree.lexemes.push_back(std::move(lex));
        tree.nodes.push_back(std::move(leaf));
      }
    }
  }

  // Drops a nameless single-child root, reindexing the remaining nodes.
  static void unwrap(ConstituencyParse& tree) {
    while (tree.nodes.size() > 1 && tree.nodes[0].label.empty() &&
           tree.nodes[0].children.size() == 1 &&
           !tree.nodes[tree.nodes[0].children[0]].is_leaf()) {
      std::vector<ConstituencyNode> nodes(tree.nodes.begin() + 1,
                                          tree.nodes.end());
      for (auto& n : nodes) {
        for (auto& c : n.children) --c;
        if (n.parent) {
          n.parent = *n.parent == 0 ? std::nullopt
                                    : std::optional<std::size_t>(*n.parent - 1);
        }
      }
      tree.nodes = std::move(nodes);
    }
  }

  std::string_view text_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

void write_node(const ConstituencyParse& tree, std::size_t id,
                std::string& out) {
  const auto& node = tree.nodes[id];
  if (node.is_leaf()) {
    out += tree.lexemes[*node.lexeme].form;
    return;
  }
  out += '(';
  out += node.label;
  for (std::size_t c : node.children) {
    out += ' ';
    write_node(tree, c, out);
  }
  out += ')';
}

}  // namespace

std::vector<ConstituencyParse> read_bracketed(std::string_view text) {
  std::vector<ConstituencyParse> out;
  std::size_t base = 0;
  for (std::string_view line : text_util::split_lines(text)) {
    const std::size_t line_base = base;
    base += line.size() + 1;
    if (text_util::trim(line).empty()) continue;
    ConstituencyParse tree = TreeReader(line, line_base).read();
    tree.text = join_forms(tree.lexemes);
    locate_lexemes(tree.lexemes, tree.text);
    out.push_back(std::move(tree));
  }
  return out;
}

std::string write_bracketed(const ConstituencyParse& tree) {
  std::string out;
  if (!tree.nodes.empty()) write_node(tree, 0, out);
  return out;
}

}  // namespace syhgt
