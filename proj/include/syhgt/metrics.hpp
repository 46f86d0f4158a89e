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

// SQuAD 2.0 exact match and token F1, following the official evaluation
// script (v2.0) step for step.

#ifndef SYHGT_METRICS_HPP_
#define SYHGT_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace syhgt {

// Lowercase, drop ASCII punctuation, drop the words a/an/the, collapse
// whitespace.
std::string normalize_answer(std::string_view text);

// Whitespace tokens of the normalized text.
std::vector<std::string> answer_tokens(std::string_view text);

struct AnswerScore {
  double em = 0.0;  // 0 or 1
  double f1 = 0.0;
};

// Max over gold answers. Gold answers that normalize to "" are ignored; if
// none remain the question is treated as unanswerable and only an answer
// that normalizes to "" scores 1.
AnswerScore em_f1(std::string_view prediction,
                  std::span<const std::string> gold_answers);

struct EvalItem {
  std::string id;
  std::vector<std::string> gold_answers;  // empty for unanswerable
  std::string prediction;
};

struct EvalResult {
  double exact = 0.0;  // percentages
  double f1 = 0.0;
  std::size_t total = 0;
  double has_ans_exact = 0.0;
  double has_ans_f1 = 0.0;
  std::size_t has_ans_total = 0;
  double no_ans_exact = 0.0;
  double no_ans_f1 = 0.0;
  std::size_t no_ans_total = 0;
  std::vector<AnswerScore> per_item;
};

// Throws ConfigError for an empty item list.
EvalResult evaluate_items(std::span<const EvalItem> items);

// {"exact","f1","total","HasAns_exact","HasAns_f1","HasAns_total",
//  "NoAns_exact","NoAns_f1","NoAns_total"}; the HasAns/NoAns groups are
// present only when non-empty.
nlohmann::ordered_json eval_report_json(const EvalResult& result);

}  // namespace syhgt

#endif  // SYHGT_METRICS_HPP_
