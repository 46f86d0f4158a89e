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

// Paths and small builders shared by the test binaries.

#ifndef SYHGT_TESTS_SUPPORT_FIXTURES_HPP_
#define SYHGT_TESTS_SUPPORT_FIXTURES_HPP_

#include <unistd.h>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "syhgt/alignment.hpp"
#include "syhgt/graph.hpp"
#include "syhgt/io.hpp"
#include "syhgt/syntax.hpp"
#include "syhgt/wordpiece.hpp"

namespace syhgt::testing {

inline std::filesystem::path data_path(std::string_view name) {
  return std::filesystem::path(SYHGT_TEST_DATA_DIR) / name;
}

inline std::string read_data(std::string_view name) {
  return read_file(data_path(name));
}

inline const Vocab& fixture_vocab() {
  static const Vocab vocab = Vocab::parse(read_data("vocab.txt"));
  return vocab;
}

// Unique scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(std::string_view tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("syhgt_" + std::string(tag) + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Sentence graph over its own subwords (no special tokens).
struct SentenceGraph {
  std::vector<SubwordToken> subwords;
  Alignment alignment;
  HeteroGraph graph;
};

inline SentenceGraph dependency_sentence(const DependencyParse& parse,
                                         const Vocab& vocab = fixture_vocab()) {
  SentenceGraph s;
  s.subwords = tokenize_subwords(parse.text, vocab);
  s.alignment = align_subwords_to_lexemes(s.subwords, parse.lexemes);
  const std::vector<Alignment> al{s.alignment};
  const std::vector<DependencyParse> parses{parse};
  s.graph = build_dependency_graph(s.subwords, al, parses);
  return s;
}

inline SentenceGraph constituency_sentence(const ConstituencyParse& tree,
                                           const Vocab& vocab = fixture_vocab()) {
  SentenceGraph s;
  s.subwords = tokenize_subwords(tree.text, vocab);
  s.alignment = align_subwords_to_lexemes(s.subwords, tree.lexemes);
  const std::vector<Alignment> al{s.alignment};
  const std::vector<ConstituencyParse> trees{tree};
  s.graph = build_constituency_graph(s.subwords, al, trees);
  return s;
}

}  // namespace syhgt::testing

#endif  // SYHGT_TESTS_SUPPORT_FIXTURES_HPP_
