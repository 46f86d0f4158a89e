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

#include <json.hpp>

#include "fixtures.hpp"
#include "syhgt/error.hpp"
#include "syhgt/metrics.hpp"
#include "syhgt/tensor.hpp"

using namespace syhgt;
using nlohmann::json;
using syhgt::testing::read_data;

namespace {

AnswerScore score(const std::string& pred, std::vector<std::string> golds) {
  return em_f1(pred, golds);
}

}  // namespace

TEST_CASE("normalize_answer examples") {
  CHECK(normalize_answer("The  Norman Conquest!") == "norman conquest");
  CHECK(normalize_answer("").empty());
  CHECK(normalize_answer("a an the").empty());
  CHECK(normalize_answer("theory of the atom") == "theory of atom");
  CHECK(normalize_answer("anthem") == "anthem");
  CHECK(normalize_answer("ΟΔΥΣΣΕΥΣ") == "οδυσσευς");
}

TEST_CASE("em_f1 examples") {
  const auto a = score("tech-oriented economy", {"tech-oriented"});
  CHECK(a.em == 0.0);
  CHECK(a.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const auto b = score("Denver Broncos", {"Broncos", "Denver Broncos"});
  CHECK(b.em == 1.0);
  CHECK(b.f1 == 1.0);
  CHECK(score("", {}).em == 1.0);
  CHECK(score("x", {}).f1 == 0.0);
  CHECK(score("", {"Paris"}).f1 == 0.0);
}

TEST_CASE("golden fixture parity with the official evaluator") {
  const json golden = json::parse(read_data("metrics_golden.json"));
  REQUIRE(golden["cases"].size() == 25);
  std::vector<EvalItem> items;
  for (const auto& c : golden["cases"]) {
    const std::string pred = c["prediction"];
    const auto golds = c["gold_answers"].get<std::vector<std::string>>();
    INFO(pred);
    CHECK(normalize_answer(pred) == c["normalized_prediction"].get<std::string>());
    const AnswerScore s = em_f1(pred, golds);
    CHECK(s.em == c["em"].get<double>());
    CHECK(s.f1 == c["f1"].get<double>());
    items.push_back({std::to_string(items.size()), golds, pred});
  }
  const json report = json(eval_report_json(evaluate_items(items)));
  CHECK(report == golden["report"]);
}

TEST_CASE("property: em implies f1, ranges, self match") {
  Rng rng(1);
  const std::vector<std::string> words{"the", "cat", "Dog", "a", "sat,", "on", "mat!", "an", "x"};
  auto phrase = [&] {
    std::string s;
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += rng.below(2) ? " " : "  ";
      s += words[rng.below(words.size())];
    }
    return s;
  };
  for (int trial = 0; trial < 500; ++trial) {
    const std::string p = phrase();
    const std::string g = phrase();
    const AnswerScore s = score(p, {g});
    CHECK(s.f1 >= 0.0);
    CHECK(s.f1 <= 1.0);
    if (s.em == 1.0) CHECK(s.f1 == 1.0);
    CHECK(score(g, {g}).em == 1.0);
    // symmetric when both sides have tokens
    if (!normalize_answer(p).empty() && !normalize_answer(g).empty()) {
      CHECK(s.f1 == doctest::Approx(score(g, {p}).f1).epsilon(1e-15));
    }
    CHECK(normalize_answer(normalize_answer(p)) == normalize_answer(p));
  }
}

TEST_CASE("evaluate_items report") {
  const std::vector<EvalItem> items{
      {"q1", {"tech-oriented"}, "tech-oriented"},
      {"q2", {}, ""},
      {"q3", {"Paris"}, "London"},
  };
  const auto r = evaluate_items(items);
  CHECK(r.total == 3);
  CHECK(r.exact == doctest::Approx(200.0 / 3.0));
  CHECK(r.has_ans_total == 2);
  CHECK(r.has_ans_exact == 50.0);
  CHECK(r.no_ans_exact == 100.0);
  const auto j = eval_report_json(r);
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  CHECK(keys == std::vector<std::string>{"exact", "f1", "total", "HasAns_exact", "HasAns_f1",
                                         "HasAns_total", "NoAns_exact", "NoAns_f1", "NoAns_total"});
  const std::vector<EvalItem> only_has{{"q1", {"x"}, "x"}};
  CHECK_FALSE(eval_report_json(evaluate_items(only_has)).contains("NoAns_total"));
  CHECK_THROWS_AS(evaluate_items(std::vector<EvalItem>{}), ConfigError);
}
