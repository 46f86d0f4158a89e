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

#include "syhgt/metrics.hpp"

#include <algorithm>
#include <map>

#include "syhgt/error.hpp"
#include "text_util.hpp"

namespace syhgt {
namespace {

bool is_cased_letter(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= 0xC0 && c <= 0x24F && c != 0xD7 && c != 0xF7) ||
         (c >= 0x386 && c <= 0x3FF) || (c >= 0x400 && c <= 0x52F);
}

// Lowercasing for ASCII, Latin-1, Latin Extended-A, Greek and Cyrillic.
char32_t lower(char32_t c, char32_t prev, char32_t next) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x17F) {
    if (c == 0x130 || c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) {
      return c;
    }
    if (c == 0x178) return 0xFF;
    const bool odd_upper = (c >= 0x139 && c <= 0x148) || (c >= 0x179 && c <= 0x17E);
    if (odd_upper) return (c % 2 == 1) ? c + 1 : c;
    return (c % 2 == 0) ? c + 1 : c;
  }
  if (c == 0x3A3) {
    // Final sigma.
    return (is_cased_letter(prev) && !is_cased_letter(next)) ? 0x3C2 : 0x3C3;
  }
  if (c >= 0x391 && c <= 0x3AB && c != 0x3A2) return c + 32;
  if (c == 0x386) return 0x3AC;
  if (c >= 0x388 && c <= 0x38A) return c + 37;
  if (c == 0x38C) return 0x3CC;
  if (c == 0x38E || c == 0x38F) return c + 63;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  return c;
}

bool is_ascii_punct(char32_t c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}

bool is_word_char(char32_t c) {
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
           (c >= 'A' && c <= 'Z') || c == '_';
  }
  return !text_util::is_unicode_space(c) && !text_util::is_punctuation(c);
}

std::vector<char32_t> decode(std::string_view text) {
  std::vector<char32_t> out;
  std::size_t pos = 0;
  while (pos < text.size()) out.push_back(text_util::utf8_next(text, pos));
  return out;
}

// re.sub(r"\b(a|an|the)\b", " ", s)
std::vector<char32_t> remove_articles(const std::vector<char32_t>& s) {
  static const std::u32string kArticles[] = {U"a", U"an", U"the"};
  std::vector<char32_t> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary_before = i == 0 || !is_word_char(s[i - 1]);
    std::size_t matched = 0;
    if (boundary_before && is_word_char(s[i])) {
      for (const auto& art : kArticles) {
        if (i + art.size() > s.size()) continue;
        if (!std::equal(art.begin(), art.end(), s.begin() + i)) continue;
        const std::size_t j = i + art.size();
        if (j == s.size() || !is_word_char(s[j])) {
          matched = art.size();
          break;
        }
      }
    }
    if (matched) {
      out.push_back(' ');
      i += matched;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

}  // namespace

std::string normalize_answer(std::string_view text) {
  const std::vector<char32_t> cps = decode(text);
  std::vector<char32_t> lowered;
  lowered.reserve(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t prev = i > 0 ? cps[i - 1] : 0;
    const char32_t next = i + 1 < cps.size() ? cps[i + 1] : 0;
    lowered.push_back(lower(cps[i], prev, next));
  }
  std::vector<char32_t> no_punct;
  for (char32_t c : lowered) {
    if (!is_ascii_punct(c)) no_punct.push_back(c);
  }
  const std::vector<char32_t> no_articles = remove_articles(no_punct);

  std::string out;
  bool pending_space = false;
  for (char32_t c : no_articles) {
    if (text_util::is_unicode_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    text_util::utf8_append(out, c);
  }
  return out;
}

std::vector<std::string> answer_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;
  const std::string norm = normalize_answer(text);
  for (std::string_view t : text_util::split(norm, ' ')) {
    if (!t.empty()) tokens.emplace_back(t);
  }
  return tokens;
}

namespace {

double compute_f1(std::string_view gold, std::string_view pred) {
  const auto gold_toks = answer_tokens(gold);
  const auto pred_toks = answer_tokens(pred);
  if (gold_toks.empty() || pred_toks.empty()) {
    return gold_toks == pred_toks ? 1.0 : 0.0;
  }
  std::map<std::string, long> counts;
  for (const auto& t : gold_toks) ++counts[t];
  long num_same = 0;
  for (const auto& t : pred_toks) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++num_same;
    }
  }
  if (num_same == 0) return 0.0;
  const double precision = 1.0 * static_cast<double>(num_same) /
                           static_cast<double>(pred_toks.size());
  const double recall = 1.0 * static_cast<double>(num_same) /
                        static_cast<double>(gold_toks.size());
  return (2 * precision * recall) / (precision + recall);
}

}  // namespace

AnswerScore em_f1(std::string_view prediction,
                  std::span<const std::string> gold_answers) {
  std::vector<std::string> golds;
  for (const auto& g : gold_answers) {
    if (!normalize_answer(g).empty()) golds.push_back(g);
  }
  if (golds.empty()) golds.emplace_back();
  const std::string pred_norm = normalize_answer(prediction);
  AnswerScore score;
  for (const auto& g : golds) {
    score.em = std::max(score.em, normalize_answer(g) == pred_norm ? 1.0 : 0.0);
    score.f1 = std::max(score.f1, compute_f1(g, prediction));
  }
  return score;
}

EvalResult evaluate_items(std::span<const EvalItem> items) {
  if (items.empty()) throw ConfigError("nothing to evaluate: empty example set");
  EvalResult r;
  double exact = 0.0, f1 = 0.0;
  double has_exact = 0.0, has_f1 = 0.0;
  double no_exact = 0.0, no_f1 = 0.0;
  for (const auto& item : items) {
    const AnswerScore s = em_f1(item.prediction, item.gold_answers);
    r.per_item.push_back(s);
    exact += s.em;
    f1 += s.f1;
    if (!item.gold_answers.empty()) {
      has_exact += s.em;
      has_f1 += s.f1;
      ++r.has_ans_total;
    } else {
      no_exact += s.em;
      no_f1 += s.f1;
      ++r.no_ans_total;
    }
  }
  auto pct = [](double sum, std::size_t n) {
    return n == 0 ? 0.0 : 100.0 * sum / static_cast<double>(n);
  };
  r.total = items.size();
  r.exact = pct(exact, r.total);
  r.f1 = pct(f1, r.total);
  r.has_ans_exact = pct(has_exact, r.has_ans_total);
  r.has_ans_f1 = pct(has_f1, r.has_ans_total);
  r.no_ans_exact = pct(no_exact, r.no_ans_total);
  r.no_ans_f1 = pct(no_f1, r.no_ans_total);
  return r;
}

nlohmann::ordered_json eval_report_json(const EvalResult& r) {
  nlohmann::ordered_json j;
  j["exact"] = r.exact;
  j["f1"] = r.f1;
  j["total"] = r.total;
  if (r.has_ans_total > 0) {
    j["HasAns_exact"] = r.has_ans_exact;
    j["HasAns_f1"] = r.has_ans_f1;
    j["HasAns_total"] = r.has_ans_total;
  }
  if (r.no_ans_total > 0) {
    j["NoAns_exact"] = r.no_ans_exact;
    j["NoAns_f1"] = r.no_ans_f1;
    j["NoAns_total"] = r.no_ans_total;
  }
  return j;
}

}  // namespace syhgt
