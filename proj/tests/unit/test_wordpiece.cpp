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

#include <doctest.h>

#include <string>
#include <vector>

#include "fixtures.hpp"
#include "syhgt/error.hpp"
#include "syhgt/tensor.hpp"
#include "syhgt/wordpiece.hpp"

using namespace syhgt;
using syhgt::testing::fixture_vocab;

namespace {

std::vector<std::string> pieces(const std::vector<SubwordToken>& toks) {
  std::vector<std::string> out;
  for (const auto& t : toks) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("tokenize_subwords: whole word") {
  const auto toks = tokenize_subwords("economy", fixture_vocab());
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].text == "economy");
  CHECK(toks[0].char_start == 0);
  CHECK(toks[0].char_end == 7);
  CHECK_FALSE(toks[0].is_special);
  CHECK(toks[0].id == *fixture_vocab().find("economy"));
}

TEST_CASE("tokenize_subwords: greedy split") {
  const auto toks = tokenize_subwords("steamboats", fixture_vocab());
  CHECK(pieces(toks) == std::vector<std::string>{"steam", "##boats"});
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].char_start == 0);
  CHECK(toks[0].char_end == 5);
  CHECK(toks[1].char_start == 5);
  CHECK(toks[1].char_end == 10);
}

TEST_CASE("tokenize_subwords: longest match wins over shorter prefixes") {
  const Vocab v = Vocab::parse("[PAD]\n[UNK]\n[CLS]\n[SEP]\na\nab\nabc\n##d\n##cd\n");
  CHECK(pieces(tokenize_subwords("abcd", v)) == std::vector<std::string>{"abc", "##d"});
}

TEST_CASE("tokenize_subwords: unknown word") {
  const std::string snowman = "\xE2\x98\x83";
  const auto toks = tokenize_subwords(snowman, fixture_vocab());
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].text == "[UNK]");
  CHECK(toks[0].id == fixture_vocab().unk_id());
  CHECK(toks[0].char_start == 0);
  CHECK(toks[0].char_end == snowman.size());
}

TEST_CASE("tokenize_subwords: partial decomposition falls back to one [UNK]") {
  // "steamx": "steam" matches but "##x" does not
  const auto toks = tokenize_subwords("ships steamx", fixture_vocab());
  REQUIRE(toks.size() == 2);
  CHECK(toks[1].text == "[UNK]");
  CHECK(toks[1].char_start == 6);
  CHECK(toks[1].char_end == 12);
}

TEST_CASE("tokenize_subwords: punctuation splits words") {
  const auto toks = tokenize_subwords("tech-oriented economy.", fixture_vocab());
  CHECK(pieces(toks) ==
        std::vector<std::string>{"tech", "-", "oriented", "economy", "."});
}

TEST_CASE("tokenize_subwords: words over 100 code points") {
  const Vocab v = Vocab::parse("[PAD]\n[UNK]\n[CLS]\n[SEP]\na\n##a\n");
  CHECK(tokenize_subwords(std::string(100, 'a'), v).size() == 100);
  const auto toks = tokenize_subwords(std::string(101, 'a'), v);
  REQUIRE(toks.size() == 1);
  CHECK(toks[0].text == "[UNK]");
}

TEST_CASE("Vocab::parse errors") {
  CHECK_THROWS_AS(Vocab::parse(""), ConfigError);
  CHECK_THROWS_AS(Vocab::parse("\n\n"), ConfigError);
  CHECK_THROWS_AS(Vocab::parse("[PAD]\n[UNK]\n[CLS]\n"), ConfigError);
}

TEST_CASE("Vocab ids are line numbers and specials sit at (0,0)") {
  const Vocab& v = fixture_vocab();
  CHECK(*v.find("[PAD]") == 0);
  CHECK(v.piece(*v.find("steam")) == "steam");
  const SubwordToken cls = v.special(kClsPiece);
  CHECK(cls.is_special);
  CHECK(cls.char_start == 0);
  CHECK(cls.char_end == 0);
  CHECK_FALSE(v.find("absent").has_value());
  CHECK(v.id_or_unk("absent") == v.unk_id());
}

TEST_CASE("property: subwords tile the word spans exactly") {
  const std::vector<std::string> alphabet{"steam", "boats", "ships", "a", " ", "  ", "-",
                                          ",", "\t", "tech", "x", "\xC3\xA9", "economy",
                                          "\xE2\x80\x83"};
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    const std::size_t parts = rng.below(12);
    for (std::size_t i = 0; i < parts; ++i) text += alphabet[rng.below(alphabet.size())];
    const auto words = split_words(text);
    const auto toks = tokenize_subwords(text, fixture_vocab());
    std::size_t t = 0;
    for (const auto& w : words) {
      std::size_t cursor = w.begin;
      while (t < toks.size() && toks[t].char_start < w.end) {
        CHECK(toks[t].char_start == cursor);
        CHECK(toks[t].char_end > toks[t].char_start);
        cursor = toks[t].char_end;
        ++t;
      }
      CHECK(cursor == w.end);
    }
    CHECK(t == toks.size());
  }
}
